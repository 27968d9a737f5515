#include "authprof/linsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "authprof/errors.hpp"
#include "authprof/rng.hpp"

namespace authprof {

namespace {

double sparse_dot(const std::vector<double>& w, const SparseVector& x) {
    double sum = 0;
    for (const auto& [idx, v] : x.entries) sum += w[idx] * v;
    return sum;
}

void sparse_axpy(double a, const SparseVector& x, std::vector<double>& w) {
    for (const auto& [idx, v] : x.entries) w[idx] += a * v;
}

void check_training_input(const std::vector<SparseVector>& X, const std::vector<int>& y) {
    if (X.size() != y.size()) throw ValidationError("X and y size mismatch");
    if (X.empty()) throw ValidationError("empty training set");
    bool has_pos = false, has_neg = false;
    const std::uint32_t dim = X[0].dimension;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (y[i] != 1 && y[i] != -1) throw ValidationError("labels must be +1 or -1");
        (y[i] == 1 ? has_pos : has_neg) = true;
        if (X[i].dimension != dim) throw ValidationError("inconsistent feature dimensions");
        for (const auto& [idx, v] : X[i].entries) {
            if (idx >= dim) throw ValidationError("feature index out of range");
            if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
        }
    }
    if (!has_pos || !has_neg) {
        throw ValidationError("training set must contain both classes");
    }
}

// log(1 + exp(z)) without overflow.
double log1pexp(double z) {
    if (z > 0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

} // namespace

double PlattCalibrator::probability(double score) const {
    double z = A * score + B;
    z = std::clamp(z, -500.0, 500.0);
    return 1.0 / (1.0 + std::exp(z));
}

BinaryLinearModel train_binary(const std::vector<SparseVector>& X, const std::vector<int>& y,
                               double C, const BinaryTrainOptions& opts,
                               BinaryTrainDiagnostics* diag) {
    check_training_input(X, y);
    if (!(C > 0) || !std::isfinite(C)) throw ValidationError("C must be positive and finite");
    if (!(opts.tol > 0)) throw ValidationError("tol must be positive");
    if (opts.max_epochs < 1) throw ValidationError("max_epochs must be positive");

    const std::size_t l = X.size();
    const std::uint32_t dim = X[0].dimension;
    // Last slot is the augmented bias feature.
    std::vector<double> w(dim + 1, 0.0);
    std::vector<double> alpha(l, 0.0);
    std::vector<double> q_diag(l);
    for (std::size_t i = 0; i < l; ++i) {
        double sq = 1.0; // augmented constant feature
        for (const auto& [_, v] : X[i].entries) sq += v * v;
        q_diag[i] = sq;
    }

    std::vector<std::size_t> order(l);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(opts.seed);

    if (diag) {
        diag->dual_objective_by_epoch.clear();
        diag->converged = false;
    }

    int epoch = 0;
    bool converged = false;
    for (; epoch < opts.max_epochs; ++epoch) {
        rng.shuffle(order);
        double max_violation = 0;
        for (const std::size_t i : order) {
            const double yi = y[i];
            // Gradient of the dual objective in coordinate i.
            const double g = yi * (sparse_dot(w, X[i]) + w[dim]) - 1.0;

            double pg; // projected gradient
            if (alpha[i] <= 0.0) {
                pg = std::min(g, 0.0);
            } else if (alpha[i] >= C) {
                pg = std::max(g, 0.0);
            } else {
                pg = g;
            }
            max_violation = std::max(max_violation, std::abs(pg));

            if (std::abs(pg) > 1e-12) {
                const double old = alpha[i];
                alpha[i] = std::clamp(old - g / q_diag[i], 0.0, C);
                const double d = (alpha[i] - old) * yi;
                sparse_axpy(d, X[i], w);
                w[dim] += d;
            }
        }
        if (diag) {
            double wsq = 0;
            for (double v : w) wsq += v * v;
            double asum = 0;
            for (double a : alpha) asum += a;
            diag->dual_objective_by_epoch.push_back(asum - 0.5 * wsq);
        }
        if (max_violation < opts.tol) {
            converged = true;
            ++epoch;
            break;
        }
    }

    BinaryLinearModel model;
    model.weights.assign(w.begin(), w.end() - 1);
    model.bias = w[dim];
    model.C = C;

    if (diag) {
        diag->alpha = alpha;
        diag->epochs = epoch;
        diag->converged = converged;
        double wsq = 0;
        for (double v : w) wsq += v * v;
        double asum = 0;
        for (double a : alpha) asum += a;
        diag->dual_objective = asum - 0.5 * wsq;
        double hinge = 0;
        for (std::size_t i = 0; i < l; ++i) {
            hinge += std::max(0.0, 1.0 - y[i] * (sparse_dot(model.weights, X[i]) + model.bias));
        }
        diag->primal_objective = 0.5 * wsq + C * hinge;
    }
    return model;
}

double decision(const BinaryLinearModel& model, const SparseVector& x) {
    if (x.dimension != model.weights.size()) {
        throw ValidationError("dimension mismatch: model has " +
                              std::to_string(model.weights.size()) + ", vector has " +
                              std::to_string(x.dimension));
    }
    return sparse_dot(model.weights, x) + model.bias;
}

namespace {

// 1-D Newton on the offset alone, used when every score is identical. The
// likelihood then depends only on z = B, and the optimum puts the
// calibrated probability at the mean regularized target.
double fit_offset_only(const std::vector<double>& targets) {
    double z = 0;
    for (int it = 0; it < 200; ++it) {
        double g = 0, h = 1e-12;
        for (double t : targets) {
            const double p = 1.0 / (1.0 + std::exp(z)); // P(positive)
            g += t - p;
            h += p * (1.0 - p);
        }
        if (std::abs(g) < 1e-12) break;
        z -= g / h; // F'(z) = sum(t - p), F''(z) = sum(p(1-p))
    }
    return z;
}

} // namespace

PlattCalibrator fit_platt(const std::vector<double>& scores, const std::vector<int>& y) {
    if (scores.size() != y.size()) throw ValidationError("scores and y size mismatch");
    if (scores.empty()) throw ValidationError("empty calibration set");
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw ValidationError("non-finite calibration score");
        if (y[i] == 1) ++n_pos;
        else if (y[i] == -1) ++n_neg;
        else throw ValidationError("labels must be +1 or -1");
    }
    if (n_pos == 0 || n_neg == 0) {
        throw ValidationError("calibration set must contain both classes");
    }

    const std::size_t n = scores.size();
    const double t_pos = (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0);
    const double t_neg = 1.0 / (static_cast<double>(n_neg) + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] == 1 ? t_pos : t_neg;

    const auto [min_it, max_it] = std::minmax_element(scores.begin(), scores.end());
    PlattCalibrator cal;
    if (*max_it - *min_it < 1e-12) {
        cal.A = 0;
        cal.B = fit_offset_only(t);
        return cal;
    }

    // Newton with backtracking on the regularized negative log-likelihood
    // F(A,B) = sum_i [t_i * z_i + log(1 + exp(-z_i))], z_i = A*s_i + B.
    double A = 0;
    double B = std::log((static_cast<double>(n_neg) + 1.0) / (static_cast<double>(n_pos) + 1.0));

    const auto objective = [&](double a, double b) {
        double f = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = a * scores[i] + b;
            f += t[i] * z + log1pexp(-z);
        }
        return f;
    };

    const double gtol = 1e-8;
    const double ridge = 1e-12;
    double fval = objective(A, B);
    for (int it = 0; it < 200; ++it) {
        double h11 = ridge, h22 = ridge, h21 = 0;
        double g1 = 0, g2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = A * scores[i] + B;
            double p; // P(positive | z) = sigma(-z)
            if (z >= 0) {
                const double e = std::exp(-z);
                p = e / (1.0 + e);
            } else {
                p = 1.0 / (1.0 + std::exp(z));
            }
            const double pq = p * (1.0 - p);
            h11 += scores[i] * scores[i] * pq;
            h22 += pq;
            h21 += scores[i] * pq;
            const double d = t[i] - p; // dF/dz
            g1 += scores[i] * d;
            g2 += d;
        }
        if (std::abs(g1) < gtol && std::abs(g2) < gtol) break;

        const double det = h11 * h22 - h21 * h21;
        const double dA = -(h22 * g1 - h21 * g2) / det;
        const double dB = -(-h21 * g1 + h11 * g2) / det;
        const double slope = g1 * dA + g2 * dB; // negative: descent direction

        double step = 1;
        bool moved = false;
        while (step >= 1e-10) {
            const double f_new = objective(A + step * dA, B + step * dB);
            if (f_new < fval + 1e-4 * step * slope) {
                A += step * dA;
                B += step * dB;
                fval = f_new;
                moved = true;
                break;
            }
            step /= 2;
        }
        if (!moved) break; // line search failed; gradient is numerically flat
    }
    cal.A = A;
    cal.B = B;
    return cal;
}

namespace {

// Round-robin fold split applied separately to positives and negatives,
// each shuffled by the given seed after sorting by index.
std::vector<int> stratified_binary_folds(const std::vector<int>& y, int k, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
    std::vector<int> fold(y.size(), 0);
    Rng pos_rng(mix_seed(seed, 0));
    Rng neg_rng(mix_seed(seed, 1));
    pos_rng.shuffle(pos);
    neg_rng.shuffle(neg);
    for (std::size_t i = 0; i < pos.size(); ++i) fold[pos[i]] = static_cast<int>(i % k);
    for (std::size_t i = 0; i < neg.size(); ++i) fold[neg[i]] = static_cast<int>(i % k);
    return fold;
}

} // namespace

CalibratedLinearModel train_multiclass(const std::vector<SparseVector>& X,
                                       const std::vector<std::string>& y,
                                       const std::vector<std::string>& labels, double C,
                                       const MulticlassTrainOptions& opts) {
    if (X.size() != y.size()) throw ValidationError("X and y size mismatch");
    if (X.empty()) throw ValidationError("empty training set");
    if (labels.size() < 2) throw ValidationError("need at least 2 distinct labels");
    if (opts.calibration_folds < 2) throw ValidationError("calibration_folds must be at least 2");

    std::map<std::string, std::size_t> label_count;
    for (const auto& label : labels) {
        if (label_count.count(label)) throw ValidationError("duplicate label '" + label + "'");
        label_count[label] = 0;
    }
    for (const auto& yi : y) {
        auto it = label_count.find(yi);
        if (it == label_count.end()) {
            throw ValidationError("training label '" + yi + "' not in label set");
        }
        ++it->second;
    }
    for (const auto& [label, count] : label_count) {
        if (count < static_cast<std::size_t>(opts.calibration_folds)) {
            throw ValidationError("label '" + label + "' has " + std::to_string(count) +
                                  " examples; need at least " +
                                  std::to_string(opts.calibration_folds) +
                                  " for out-of-fold calibration");
        }
    }

    CalibratedLinearModel model;
    model.labels = labels;
    model.dimension = X[0].dimension;
    model.C = C;

    BinaryTrainOptions bin_opts;
    bin_opts.tol = opts.tol;
    bin_opts.max_epochs = opts.max_epochs;

    for (std::size_t li = 0; li < labels.size(); ++li) {
        std::vector<int> yb(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) yb[i] = y[i] == labels[li] ? 1 : -1;

        // Out-of-fold decision scores for calibration.
        const int k = opts.calibration_folds;
        const auto fold = stratified_binary_folds(yb, k, mix_seed(opts.seed, 1000 + li));
        std::vector<double> oof_scores(y.size(), 0.0);
        for (int f = 0; f < k; ++f) {
            std::vector<SparseVector> x_train;
            std::vector<int> y_train;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (fold[i] != f) {
                    x_train.push_back(X[i]);
                    y_train.push_back(yb[i]);
                }
            }
            bin_opts.seed = mix_seed(opts.seed, li * 16 + static_cast<std::size_t>(f));
            const BinaryLinearModel fold_model = train_binary(x_train, y_train, C, bin_opts);
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (fold[i] == f) oof_scores[i] = decision(fold_model, X[i]);
            }
        }
        model.calibrators.push_back(fit_platt(oof_scores, yb));

        bin_opts.seed = mix_seed(opts.seed, li * 16 + 15);
        model.models.push_back(train_binary(X, yb, C, bin_opts));
    }
    return model;
}

std::vector<double> predict_proba(const CalibratedLinearModel& model, const SparseVector& x) {
    if (x.dimension != model.dimension) {
        throw ValidationError("dimension mismatch: model has " + std::to_string(model.dimension) +
                              ", vector has " + std::to_string(x.dimension));
    }
    std::vector<double> probs(model.labels.size());
    double sum = 0;
    for (std::size_t li = 0; li < model.labels.size(); ++li) {
        probs[li] = model.calibrators[li].probability(decision(model.models[li], x));
        sum += probs[li];
    }
    if (sum <= 0) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(probs.size()));
    } else {
        for (double& p : probs) p /= sum;
    }
    return probs;
}

std::size_t predict_label_index(const CalibratedLinearModel& model, const SparseVector& x) {
    const auto probs = predict_proba(model, x);
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[best]) best = i;
    }
    return best;
}

} // namespace authprof
