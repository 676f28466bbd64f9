#pragma once

#include "kronldp/linalg.hpp"
#include "kronldp/mde.hpp"
#include "kronldp/structure.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace kronldp {

struct SimConfig {
    std::uint64_t master_seed = 1;
    std::vector<int> N_schedule;
    int reps = 1;
    int parallel_width = 1;
};

// KRONLDP_THREADS when set, else the hardware count (at least 1).
int default_threads();

// Runs f(i) for i in [0, n) on up to width threads; f must only touch slot i.
void parallel_for(int n, int width, const std::function<void(int)>& f);

// Exact 95% binomial interval.
std::pair<double, double> clopper_pearson(long hits, long reps, double confidence = 0.95);

// Compensated summation.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double v)
    {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// Per-replicate seed shared by all samplers so matched runs see the same draws.
std::uint64_t replicate_seed(std::uint64_t master, int N, long rep);

struct Lambda1Draw {
    double lambda1 = 0.0;
    CMat rho;
};

std::vector<Lambda1Draw> simulate_lambda1(const StructureSet& s, int N, int reps, std::uint64_t seed,
                                          int threads = 0);

struct Histogram {
    std::vector<double> edges;
    std::vector<double> density;  // per unit length, pooled mass 1 per matrix
    double below = 0.0;           // mass left of edges.front()
    double above = 0.0;           // mass right of edges.back()
    long eigenvalues = 0;

    double mass() const;
};

Histogram empirical_spectrum(const StructureSet& s, int N, int reps, double lo, double hi, int bins,
                             std::uint64_t seed, int threads = 0);

struct ResolventOptions {
    int probes = 4;           // Rademacher probes per replicate on the iterative path
    int exact_max_dim = 600;  // NL at or below this uses a full eigendecomposition
    double tol = 1e-10;
    int max_iter = 5000;
    int threads = 0;
};

struct ResolventEstimate {
    CMat G;  // L x L average of (1/N) Tr of the resolvent blocks
    bool exact = false;
    bool ill_conditioned = false;
    int max_iterations = 0;
};

ResolventEstimate block_resolvent_trace(const StructureSet& s, int N, int reps, cplx z, std::uint64_t seed,
                                        const ResolventOptions& opt = {});

enum class TailMethod { Direct, Importance };
enum class Sampler { Auto, Dense, Tridiagonal };

std::string to_string(TailMethod m);

struct TailEstimate {
    double x = 0.0;
    double delta = 0.0;
    int N = 0;
    long reps = 0;
    long hits = 0;
    double p_hat = 0.0;
    double rate_hat = std::numeric_limits<double>::infinity();
    double ci_low = 0.0;
    double ci_high = 1.0;
    TailMethod method = TailMethod::Direct;
    bool two_sided = true;
    double theta = 0.0;
    double ess = 0.0;         // effective sample size of the hit weights
    double mean_weight = 1.0;
    bool reliable = true;
};

struct TailOptions {
    bool two_sided = true;  // {|lambda_1 - x| <= delta}; otherwise {lambda_1 >= x}
    Sampler sampler = Sampler::Auto;
    int threads = 0;
};

TailEstimate tail_probability(const StructureSet& s, double x, double delta, int N, long reps, std::uint64_t seed,
                              const TailOptions& opt = {});

struct ImportanceOptions {
    TailOptions tail;
    double theta = -1.0;  // negative: tilt_for_target at the profile below
    CMat psi;             // empty: Id/L
};

struct WeightedDraw {
    double lambda1 = 0.0;
    double weight = 1.0;
};

// Draws under the tilted law with likelihood-ratio weights. L=1 averages the tilt over
// the sphere (weight e^Lambda / spherical integral); L>1 uses one fixed u with profile psi.
std::vector<WeightedDraw> importance_draws(const StructureSet& s, double theta, const CMat& psi, int N, long reps,
                                           std::uint64_t seed, const TailOptions& opt = {});

TailEstimate importance_tail(const LimitingMeasure& mu, double x, double delta, int N, long reps,
                             std::uint64_t seed, const ImportanceOptions& opt = {});

struct TiltCheck {
    double mean = 0.0;
    double sd = 0.0;
    double predicted_Z = 0.0;
    double z_score = 0.0;  // (mean - Z) / (sd / sqrt(reps))
    int reps = 0;
};

TiltCheck tilted_outlier_check(const LimitingMeasure& mu, double theta, const CMat& psi, int N, int reps,
                               std::uint64_t seed, int threads = 0);

struct ProfileHistogramSpec {
    int bins = 7;
    double half_width = 0.0;  // 0: 3.5 standard deviations of the diagonal entry
};

struct ProfileSummary {
    int L = 0;
    int N = 0;
    long samples = 0;
    CMat mean;
    RMat sd;                     // entrywise sd of the real parts
    double det_mean = 0.0;
    double det_mode = 0.0;       // centre of the most populated det bin on [0, L^-L]
    double frac_small_det = 0.0; // fraction with det < L^-L / 2
    // L=2: counts over (psi_11, Re psi_12), row-major in psi_11
    std::vector<double> p_edges;
    std::vector<double> q_edges;
    std::vector<long> counts;
};

ProfileSummary profile_histogram(int L, int N, long reps, std::uint64_t seed, int beta = 1,
                                 const ProfileHistogramSpec& spec = {}, int threads = 0);

}  // namespace kronldp
