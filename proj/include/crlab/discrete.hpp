#pragma once

#include <array>
#include <vector>

namespace crlab {

// Exact joint distribution over three finite variables (A, B, C).
// Small alphabets only; every information quantity is computed by full
// enumeration, so this serves as a ground-truth oracle.
class DiscreteJoint {
public:
    static constexpr int kMaxSupport = 16;

    // table is laid out as p[a][b][c] with c fastest:
    // index = (a * n_b + b) * n_c + c. Entries must be nonnegative and sum
    // to 1 within 1e-12.
    DiscreteJoint(int n_a, int n_b, int n_c, std::vector<double> table);

    int n_a() const { return n_a_; }
    int n_b() const { return n_b_; }
    int n_c() const { return n_c_; }

    double operator()(int a, int b, int c) const {
        return p_[(static_cast<std::size_t>(a) * n_b_ + b) * n_c_ + c];
    }

    // Returns the joint with axes reordered; order[i] names which of the
    // current axes (0=A,1=B,2=C) becomes axis i of the result.
    DiscreteJoint permuted(const std::array<int, 3>& order) const;

private:
    int n_a_, n_b_, n_c_;
    std::vector<double> p_;
};

enum class MiKind {
    I_AB,          // I(A;B), C marginalised out
    I_AB_GIVEN_C,  // I(A;B|C)
};

// Plug-in MI/CMI in nats from the exact table. Zero-probability cells
// contribute zero. The result is mathematically nonnegative; floating
// rounding may produce values above -1e-12.
double discrete_mi(const DiscreteJoint& joint, MiKind kind);

}  // namespace crlab
