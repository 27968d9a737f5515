#pragma once

// Independent reference implementations the tests check the library
// against. Nothing here may call into the code paths under test: UTF-8 is
// re-decoded from scratch, n-grams come from a plain index loop over a
// char32_t vector, and the SVM dual is solved by dense projected gradient
// (FISTA) instead of coordinate descent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "authprof/features.hpp"
#include "authprof/unicode.hpp"

namespace oracle {

// Lead-byte-table UTF-8 decoding (assumes well-formed input, which the
// test generators guarantee).
inline std::u32string decode_utf8(const std::string& text) {
    std::u32string out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        int len;
        if (b0 < 0x80) len = 1;
        else if (b0 < 0xE0) len = 2;
        else if (b0 < 0xF0) len = 3;
        else len = 4;
        if (i + len > text.size()) throw std::runtime_error("oracle: truncated UTF-8");
        char32_t cp = 0;
        switch (len) {
            case 1: cp = b0; break;
            case 2: cp = b0 & 0x1F; break;
            case 3: cp = b0 & 0x0F; break;
            case 4: cp = b0 & 0x07; break;
        }
        for (int k = 1; k < len; ++k) {
            cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline std::string encode_utf8(const std::u32string& cps) {
    std::string out;
    for (char32_t cp : cps) authprof::unicode::append_utf8(out, cp);
    return out;
}

// Naive sliding-window n-gram counts. Character mode slides over code
// points of the lowercased text; word mode first splits on whitespace.
inline std::map<std::string, std::uint64_t> ngram_counts(const std::string& text,
                                                         const authprof::FeatureScheme& scheme) {
    std::u32string cps = decode_utf8(text);
    for (auto& cp : cps) cp = authprof::unicode::to_lower(cp);
    const std::size_t n = static_cast<std::size_t>(scheme.n);
    std::map<std::string, std::uint64_t> counts;

    if (scheme.kind == authprof::FeatureScheme::Kind::character) {
        if (cps.size() < n) return counts;
        for (std::size_t i = 0; i + n <= cps.size(); ++i) {
            ++counts[encode_utf8(cps.substr(i, n))];
        }
        return counts;
    }

    std::vector<std::u32string> tokens;
    std::u32string current;
    for (char32_t cp : cps) {
        if (authprof::unicode::is_space(cp)) {
            if (!current.empty()) tokens.push_back(current);
            current.clear();
        } else {
            current.push_back(cp);
        }
    }
    if (!current.empty()) tokens.push_back(current);
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::u32string gram = tokens[i];
        for (std::size_t j = 1; j < n; ++j) {
            gram.push_back(U' ');
            gram += tokens[i + j];
        }
        ++counts[encode_utf8(gram)];
    }
    return counts;
}

// Dense box-constrained QP oracle for the hinge-loss SVM dual with the
// bias as an augmented constant feature:
//   max_a  e'a - a'Qa/2,  0 <= a_i <= C,  Q_ij = y_i y_j (x_i.x_j + 1).
// Solved by FISTA with adaptive restart.
struct QpSolution {
    std::vector<double> alpha;
    std::vector<double> weights; // augmented; last entry is the bias
    double primal_objective = 0;
    double dual_objective = 0;
};

inline QpSolution solve_svm_dual(const std::vector<std::vector<double>>& X,
                                 const std::vector<int>& y, double C, int max_iter = 200000) {
    const std::size_t l = X.size();
    const std::size_t dim = X[0].size();
    std::vector<std::vector<double>> q(l, std::vector<double>(l));
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            double dot = 1.0;
            for (std::size_t d = 0; d < dim; ++d) dot += X[i][d] * X[j][d];
            q[i][j] = y[i] * y[j] * dot;
        }
    }
    double lipschitz = 0;
    for (std::size_t i = 0; i < l; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < l; ++j) row += std::abs(q[i][j]);
        lipschitz = std::max(lipschitz, row);
    }
    const double step = 1.0 / lipschitz;

    auto dual_value = [&](const std::vector<double>& a) {
        double quad = 0, lin = 0;
        for (std::size_t i = 0; i < l; ++i) {
            lin += a[i];
            for (std::size_t j = 0; j < l; ++j) quad += a[i] * q[i][j] * a[j];
        }
        return lin - 0.5 * quad;
    };

    std::vector<double> a(l, 0.0), z(l, 0.0), a_prev(l, 0.0), grad(l);
    double t = 1;
    double best = -1e300;
    int stall = 0;
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < l; ++i) {
            double g = -1.0; // gradient of the negated dual
            for (std::size_t j = 0; j < l; ++j) g += q[i][j] * z[j];
            grad[i] = g;
        }
        a_prev = a;
        for (std::size_t i = 0; i < l; ++i) {
            a[i] = std::clamp(z[i] - step * grad[i], 0.0, C);
        }
        const double t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
        for (std::size_t i = 0; i < l; ++i) {
            z[i] = a[i] + (t - 1) / t_next * (a[i] - a_prev[i]);
        }
        t = t_next;

        if (it % 100 == 0) {
            const double v = dual_value(a);
            if (v < best) { // momentum overshoot: restart
                z = a;
                t = 1;
            }
            if (v > best + 1e-14 * (1 + std::abs(best))) {
                best = v;
                stall = 0;
            } else if (++stall > 20) {
                break;
            }
        }
    }

    QpSolution sol;
    sol.alpha = a;
    sol.weights.assign(dim + 1, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t d = 0; d < dim; ++d) sol.weights[d] += a[i] * y[i] * X[i][d];
        sol.weights[dim] += a[i] * y[i];
    }
    sol.dual_objective = dual_value(a);
    double wsq = 0;
    for (double w : sol.weights) wsq += w * w;
    double hinge = 0;
    for (std::size_t i = 0; i < l; ++i) {
        double margin = sol.weights[dim];
        for (std::size_t d = 0; d < dim; ++d) margin += sol.weights[d] * X[i][d];
        hinge += std::max(0.0, 1.0 - y[i] * margin);
    }
    sol.primal_objective = 0.5 * wsq + C * hinge;
    return sol;
}

// Golden-section minimization of the one-parameter Platt likelihood
// F(z) = sum_i [t_i z + log(1 + exp(-z))], for the all-scores-equal case.
inline double platt_constant_probability(std::size_t n_pos, std::size_t n_neg) {
    const double t_pos = (static_cast<double>(n_pos) + 1) / (static_cast<double>(n_pos) + 2);
    const double t_neg = 1.0 / (static_cast<double>(n_neg) + 2);
    auto value = [&](double z) {
        const double softplus = z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
        return static_cast<double>(n_pos) * (t_pos * z + softplus) +
               static_cast<double>(n_neg) * (t_neg * z + softplus);
    };
    double lo = -50, hi = 50;
    const double ratio = (std::sqrt(5.0) - 1) / 2;
    double m1 = hi - ratio * (hi - lo), m2 = lo + ratio * (hi - lo);
    for (int it = 0; it < 200; ++it) {
        if (value(m1) < value(m2)) {
            hi = m2;
            m2 = m1;
            m1 = hi - ratio * (hi - lo);
        } else {
            lo = m1;
            m1 = m2;
            m2 = lo + ratio * (hi - lo);
        }
    }
    const double z = (lo + hi) / 2;
    return 1.0 / (1.0 + std::exp(z));
}

} // namespace oracle
