#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace kronldp {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive hash of a word sequence; used to derive stream keys.
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words);

// Uniform in (0,1) from the top 53 bits.
double to_unit_open(std::uint64_t bits);

// Standard normal that is a pure function of (key, counter).
double normal_at(std::uint64_t key, std::uint64_t counter);

// Counter-based stream. Satisfies UniformRandomBitGenerator so it can drive
// the std:: distributions.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0) : key_(mix64(key ^ 0x9e3779b97f4a7c15ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + mix64(counter_++)); }

    double uniform() { return to_unit_open((*this)()); }
    double normal();

    // Independent stream for a task index.
    CounterRng derive(std::uint64_t task) const { return CounterRng(hash_words({key_, task})); }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kronldp
