#include "crlab/discrete.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crlab {

DiscreteJoint::DiscreteJoint(int n_a, int n_b, int n_c, std::vector<double> table)
    : n_a_(n_a), n_b_(n_b), n_c_(n_c), p_(std::move(table)) {
    auto check_size = [](int n, const char* name) {
        if (n < 1 || n > kMaxSupport)
            throw std::invalid_argument(std::string("DiscreteJoint: ") + name +
                                        " must be in [1, 16]");
    };
    check_size(n_a_, "n_a");
    check_size(n_b_, "n_b");
    check_size(n_c_, "n_c");
    if (p_.size() != static_cast<std::size_t>(n_a_) * n_b_ * n_c_)
        throw std::invalid_argument("DiscreteJoint: table size mismatch");
    double sum = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0)) throw std::invalid_argument("DiscreteJoint: negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("DiscreteJoint: table must sum to 1 (got " +
                                    std::to_string(sum) + ")");
}

DiscreteJoint DiscreteJoint::permuted(const std::array<int, 3>& order) const {
    const int dims[3] = {n_a_, n_b_, n_c_};
    if ((1 << order[0] | 1 << order[1] | 1 << order[2]) != 0b111)
        throw std::invalid_argument("DiscreteJoint::permuted: order must be a permutation");
    const int m0 = dims[order[0]], m1 = dims[order[1]], m2 = dims[order[2]];
    std::vector<double> q(p_.size());
    for (int a = 0; a < n_a_; ++a)
        for (int b = 0; b < n_b_; ++b)
            for (int c = 0; c < n_c_; ++c) {
                const int src[3] = {a, b, c};
                const int i0 = src[order[0]], i1 = src[order[1]], i2 = src[order[2]];
                q[(static_cast<std::size_t>(i0) * m1 + i1) * m2 + i2] = (*this)(a, b, c);
            }
    return DiscreteJoint(m0, m1, m2, std::move(q));
}

namespace {

double mi_ab(const DiscreteJoint& j) {
    const int na = j.n_a(), nb = j.n_b(), nc = j.n_c();
    std::vector<double> pab(static_cast<std::size_t>(na) * nb, 0.0);
    std::vector<double> pa(na, 0.0), pb(nb, 0.0);
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b) {
            double s = 0.0;
            for (int c = 0; c < nc; ++c) s += j(a, b, c);
            pab[static_cast<std::size_t>(a) * nb + b] = s;
            pa[a] += s;
            pb[b] += s;
        }
    double mi = 0.0;
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b) {
            const double pj = pab[static_cast<std::size_t>(a) * nb + b];
            if (pj <= 0.0) continue;
            mi += pj * std::log(pj / (pa[a] * pb[b]));
        }
    return mi;
}

double mi_ab_given_c(const DiscreteJoint& j) {
    const int na = j.n_a(), nb = j.n_b(), nc = j.n_c();
    std::vector<double> pc(nc, 0.0);
    std::vector<double> pac(static_cast<std::size_t>(na) * nc, 0.0);
    std::vector<double> pbc(static_cast<std::size_t>(nb) * nc, 0.0);
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
            for (int c = 0; c < nc; ++c) {
                const double v = j(a, b, c);
                pc[c] += v;
                pac[static_cast<std::size_t>(a) * nc + c] += v;
                pbc[static_cast<std::size_t>(b) * nc + c] += v;
            }
    double mi = 0.0;
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
            for (int c = 0; c < nc; ++c) {
                const double v = j(a, b, c);
                if (v <= 0.0) continue;
                const double num = v * pc[c];
                const double den = pac[static_cast<std::size_t>(a) * nc + c] *
                                   pbc[static_cast<std::size_t>(b) * nc + c];
                mi += v * std::log(num / den);
            }
    return mi;
}

}  // namespace

double discrete_mi(const DiscreteJoint& joint, MiKind kind) {
    switch (kind) {
        case MiKind::I_AB: return mi_ab(joint);
        case MiKind::I_AB_GIVEN_C: return mi_ab_given_c(joint);
    }
    throw std::logic_error("discrete_mi: unreachable");
}

}  // namespace crlab
