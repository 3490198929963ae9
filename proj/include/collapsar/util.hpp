#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace collapsar {

// Two global tolerances: membership in a model space is checked at
// kModelTol, geometric comparisons (angles, lengths, residuals) at kGeomTol.
inline constexpr double kModelTol = 1e-10;
inline constexpr double kGeomTol = 1e-8;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_input_error : error { using error::error; };
struct degeneracy_error : error { using error::error; };
struct missing_face_error : error { using error::error; };
struct stale_step_error : error { using error::error; };
struct gluing_error : error { using error::error; };
struct construction_error : error { using error::error; };
struct realization_error : error { using error::error; };
struct budget_error : error { using error::error; };
struct connectivity_error : error { using error::error; };

struct parse_error : error {
    int line = 0;
    parse_error(const std::string& msg, int line_no)
        : error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// All randomness in the library flows through one of these, seeded explicitly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
    }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(gen_);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

// Runs fn(i) for i in [0, n) on a small thread pool. Results must be written
// to pre-sized storage indexed by i so the outcome is order-independent.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = std::min<std::size_t>(n, hw == 0 ? 2 : hw);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

// Runs try_task(i) for i in [0, n) in parallel and returns the smallest index
// that reported success, so the result does not depend on thread timing.
// Tasks may poll `cancelled` to stop early once a lower index has succeeded.
class FirstSuccess {
public:
    explicit FirstSuccess(std::size_t n) : n_(n), winner_(n) {}

    bool cancelled(std::size_t i) const { return winner_.load() < i; }

    void report_success(std::size_t i) {
        std::size_t cur = winner_.load();
        while (i < cur && !winner_.compare_exchange_weak(cur, i)) {}
    }

    // n_ means "no winner".
    std::size_t winner() const { return winner_.load(); }

private:
    std::size_t n_;
    std::atomic<std::size_t> winner_;
};

}  // namespace collapsar
