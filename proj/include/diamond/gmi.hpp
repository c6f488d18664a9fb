#pragma once

// Mutual information between jointly Gaussian scalar variables described by
// a linear model "output = sum(coeff * input) + independent noise".
//
// Variables are circularly-symmetric complex scalars with the covariance
// convention Cov(A, B) = E[A conj(B)]. Information is in bits.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "diamond/model.hpp"

namespace diamond::gmi {

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A determinant needed for the requested quantity is numerically singular.
class DegenerateModel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Term {
    std::string input;
    Complex coeff{1.0, 0.0};
};

struct Equation {
    std::string output;
    std::vector<Term> terms;
    double noise_variance = 0.0;
};

struct GaussianJoint {
    std::vector<std::string> labels;
    Eigen::MatrixXcd cov;

    std::size_t index_of(const std::string& label) const {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw ModelError("unknown variable '" + label + "'");
        return static_cast<std::size_t>(it - labels.begin());
    }

    Complex covariance(const std::string& a, const std::string& b) const {
        return cov(static_cast<Eigen::Index>(index_of(a)), static_cast<Eigen::Index>(index_of(b)));
    }

    Eigen::MatrixXcd submatrix(std::span<const std::string> block) const {
        const auto n = static_cast<Eigen::Index>(block.size());
        Eigen::MatrixXcd out(n, n);
        std::vector<Eigen::Index> idx;
        idx.reserve(block.size());
        for (const auto& b : block) idx.push_back(static_cast<Eigen::Index>(index_of(b)));
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) out(r, c) = cov(idx[r], idx[c]);
        return out;
    }
};

/// Builds the exact covariance of every variable in an acyclic linear model.
/// Equations may appear in any order; every input must be defined by some
/// equation (a source is an equation with no terms and its power as noise).
inline GaussianJoint build_joint(std::span<const Equation> model) {
    std::map<std::string, std::size_t> eq_of;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& eq = model[i];
        if (eq.output.empty()) throw ModelError("equation with empty output name");
        if (!(eq.noise_variance >= 0.0) || !std::isfinite(eq.noise_variance))
            throw ModelError("negative or non-finite noise variance for '" + eq.output + "'");
        if (!eq_of.emplace(eq.output, i).second) throw ModelError("variable '" + eq.output + "' defined twice");
    }
    for (const auto& eq : model)
        for (const auto& t : eq.terms)
            if (!eq_of.contains(t.input))
                throw ModelError("'" + eq.output + "' references undefined variable '" + t.input + "'");

    // Depth-first topological order; 0 = unvisited, 1 = on stack, 2 = done.
    std::vector<int> state(model.size(), 0);
    std::vector<std::size_t> order;
    order.reserve(model.size());
    auto visit = [&](auto&& self, std::size_t i) -> void {
        if (state[i] == 2) return;
        if (state[i] == 1) throw ModelError("cyclic definition through '" + model[i].output + "'");
        state[i] = 1;
        for (const auto& t : model[i].terms) self(self, eq_of.at(t.input));
        state[i] = 2;
        order.push_back(i);
    };
    for (std::size_t i = 0; i < model.size(); ++i) visit(visit, i);

    // Each variable is a combination of the independent innovations, one per
    // equation: row i of `loading` holds those coefficients scaled by the
    // innovation's standard deviation.
    const auto n = static_cast<Eigen::Index>(model.size());
    Eigen::MatrixXcd loading = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i : order) {
        const auto r = static_cast<Eigen::Index>(i);
        loading(r, r) = std::sqrt(model[i].noise_variance);
        for (const auto& t : model[i].terms)
            loading.row(r) += t.coeff * loading.row(static_cast<Eigen::Index>(eq_of.at(t.input)));
    }

    GaussianJoint j;
    j.labels.reserve(model.size());
    for (const auto& eq : model) j.labels.push_back(eq.output);
    j.cov = loading * loading.adjoint();
    // Exact Hermitian symmetry and real diagonal.
    j.cov = (0.5 * (j.cov + j.cov.adjoint())).eval();
    for (Eigen::Index i = 0; i < n; ++i) j.cov(i, i) = Complex(j.cov(i, i).real(), 0.0);
    return j;
}

inline GaussianJoint build_joint(std::initializer_list<Equation> model) {
    const std::vector<Equation> v(model);
    return build_joint(std::span<const Equation>(v));
}

inline constexpr double kPivotTolerance = 1e-12;

struct LogDet {
    double bits = 0.0;  // log2 det
    bool degenerate = false;
};

/// log2 det of a Hermitian PSD matrix by diagonally pivoted Cholesky. Pivots
/// below kPivotTolerance (relative to the largest diagonal entry) are clamped
/// to that tolerance and flagged.
inline LogDet log2det(Eigen::MatrixXcd a) {
    const Eigen::Index n = a.rows();
    LogDet out;
    if (n == 0) return out;
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, a(i, i).real());
    const double floor = kPivotTolerance * (scale > 0.0 ? scale : 1.0);

    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index p = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (a(i, i).real() > a(p, p).real()) p = i;
        if (p != k) {
            a.row(k).swap(a.row(p));
            a.col(k).swap(a.col(p));
        }
        const double pivot = a(k, k).real();
        if (pivot < floor) {
            out.degenerate = true;
            // Treat the remaining block as decoupled at the clamp level.
            out.bits += static_cast<double>(n - k) * std::log2(floor);
            return out;
        }
        out.bits += std::log2(pivot);
        const Eigen::Index rest = n - k - 1;
        if (rest == 0) break;
        Eigen::VectorXcd col = a.col(k).tail(rest) / pivot;
        a.bottomRightCorner(rest, rest) -= pivot * col * col.adjoint();
    }
    return out;
}

struct MiValue {
    double bits = 0.0;
    bool degenerate = false;
};

namespace detail {

inline void require_nonempty(std::span<const std::string> s, const char* what) {
    if (s.empty()) throw ModelError(std::string(what) + " block set is empty");
}

inline void require_disjoint(std::span<const std::string> a, std::span<const std::string> b) {
    for (const auto& x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) throw ModelError("block sets overlap on '" + x + "'");
}

inline std::vector<std::string> join(std::span<const std::string> a, std::span<const std::string> b) {
    std::vector<std::string> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace detail

/// I(A;B) with clamped determinants; `degenerate` reports any clamp.
inline MiValue mutual_information(const GaussianJoint& j, std::span<const std::string> a,
                                  std::span<const std::string> b) {
    detail::require_nonempty(a, "first");
    detail::require_nonempty(b, "second");
    detail::require_disjoint(a, b);
    const auto ab = detail::join(a, b);
    const LogDet da = log2det(j.submatrix(a));
    const LogDet db = log2det(j.submatrix(b));
    const LogDet dab = log2det(j.submatrix(ab));
    return {da.bits + db.bits - dab.bits, da.degenerate || db.degenerate || dab.degenerate};
}

/// I(A;B|C) = I(A; B u C) - I(A; C).
inline MiValue conditional_mutual_information(const GaussianJoint& j, std::span<const std::string> a,
                                              std::span<const std::string> b, std::span<const std::string> c) {
    detail::require_disjoint(b, c);
    detail::require_disjoint(a, c);
    if (c.empty()) return mutual_information(j, a, b);
    const auto bc = detail::join(b, c);
    const MiValue whole = mutual_information(j, a, bc);
    const MiValue side = mutual_information(j, a, c);
    return {whole.bits - side.bits, whole.degenerate || side.degenerate};
}

inline double mi(const GaussianJoint& j, std::span<const std::string> a, std::span<const std::string> b) {
    const MiValue v = mutual_information(j, a, b);
    if (v.degenerate) throw DegenerateModel("singular covariance block in I(A;B)");
    return v.bits;
}

inline double cond_mi(const GaussianJoint& j, std::span<const std::string> a, std::span<const std::string> b,
                      std::span<const std::string> c) {
    const MiValue v = conditional_mutual_information(j, a, b, c);
    if (v.degenerate) throw DegenerateModel("singular covariance block in I(A;B|C)");
    return v.bits;
}

inline double mi(const GaussianJoint& j, std::initializer_list<std::string> a, std::initializer_list<std::string> b) {
    const std::vector<std::string> va(a), vb(b);
    return mi(j, std::span<const std::string>(va), std::span<const std::string>(vb));
}

inline double cond_mi(const GaussianJoint& j, std::initializer_list<std::string> a,
                      std::initializer_list<std::string> b, std::initializer_list<std::string> c) {
    const std::vector<std::string> va(a), vb(b), vc(c);
    return cond_mi(j, std::span<const std::string>(va), std::span<const std::string>(vb),
                   std::span<const std::string>(vc));
}

}  // namespace diamond::gmi
