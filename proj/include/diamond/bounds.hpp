#pragma once

// Cut-set upper bound: the broadcast cut I(X;Y1,Y2) and the coherent MAC cut
// I(X1,X2;Y), time-shared at the fraction that equalizes them.

#include <cmath>

#include "diamond/model.hpp"
#include "diamond/rate.hpp"

namespace diamond {

struct UpperBound {
    double rate = 0.0;
    double lambda_star = 0.5;
    double bc_term = 0.0;
    double mac_term = 0.0;
};

inline double bc_cut(const LinkSnrs& s) { return std::log2(1.0 + s.gamma1 + s.gamma2); }

inline double coherent_mac_cut(const LinkSnrs& s) {
    return std::log2(1.0 + s.tgamma1 + s.tgamma2 + 2.0 * std::sqrt(s.tgamma1 * s.tgamma2));
}

inline UpperBound cutset_upper_bound(const LinkSnrs& s) {
    UpperBound ub;
    ub.bc_term = bc_cut(s);
    ub.mac_term = coherent_mac_cut(s);
    const double total = ub.bc_term + ub.mac_term;
    if (total <= 0.0) return ub;  // rate 0, lambda* = 1/2 by convention
    ub.lambda_star = ub.mac_term / total;
    ub.rate = ub.bc_term * ub.mac_term / total;
    return ub;
}

inline RateResult upper_bound_result(const Scenario& s) {
    const UpperBound ub = cutset_upper_bound(snrs(s));
    RateResult r;
    r.scheme = Scheme::upper;
    r.rate = ub.rate;
    r.lambda = ub.lambda_star;
    r.params = {{"bc_term", ub.bc_term}, {"mac_term", ub.mac_term}};
    return r;
}

}  // namespace diamond
