#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace eulsolve {

// Error hierarchy. Every failure mode surfaced by the library derives from
// Error so callers can catch coarsely or by kind.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidEdge : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct SingularBlock : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };
struct NotEulerian : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct SizeError : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };
struct NumericDrift : Error { using Error::Error; };
struct RetryExhausted : Error { using Error::Error; };
struct ChainBuildError : Error { using Error::Error; };
struct ChainError : Error { using Error::Error; };
struct Diverged : Error { using Error::Error; };
struct Stagnated : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };

// Numerical tolerances used by structural checks. The algorithms themselves
// are tolerance-free; only validation compares against these.
struct Tolerances {
    double structural_tol = 1e-9;  // relative threshold for zero-sum / Eulerian checks
    double psd_tol = 1e-8;         // eigenvalue floor for PSD assertions

    void check() const {
        if (structural_tol <= 0 || psd_tol <= 0)
            throw InvalidInput("tolerances must be positive");
    }
};

// An (F, C) split of the vertex set {0, ..., n-1}. Both sides are kept
// sorted; restriction operations preserve this relative order.
class Partition {
public:
    Partition() = default;
    // Builds the partition from the F side; C is the sorted complement.
    static Partition from_f(std::vector<int> f, int n);
    // Builds from a membership mask (true = F).
    static Partition from_mask(const std::vector<bool>& in_f);

    const std::vector<int>& f() const { return f_; }
    const std::vector<int>& c() const { return c_; }
    int n() const { return n_; }

private:
    std::vector<int> f_, c_;
    int n_ = 0;
};

}  // namespace eulsolve
