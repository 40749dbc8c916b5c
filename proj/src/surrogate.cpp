#include "thermoharvest/surrogate.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};
constexpr double kLogScaleMin = -4.605170185988091;  // log 1e-2
constexpr double kLogScaleMax = 6.907755278982137;   // log 1e3
constexpr double kLogSignalMin = -6.907755278982137; // log 1e-3
constexpr double kLogSignalMax = 6.907755278982137;

struct Factorized {
    Eigen::MatrixXd L;
    Eigen::VectorXd alpha;
    double jitter = 0.0;
    double lml = 0.0;
};

bool factorize(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double noise, Factorized& out) {
    const auto n = K.rows();
    for (double jitter : kJitterLadder) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += noise + jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) {
            continue;
        }
        Eigen::MatrixXd L = llt.matrixL();
        if (!(L.diagonal().array() > 0.0).all() || !L.allFinite()) {
            continue;
        }
        out.alpha = llt.solve(y);
        out.L = std::move(L);
        out.jitter = jitter;
        out.lml = -0.5 * y.dot(out.alpha) - out.L.diagonal().array().log().sum() -
                  0.5 * static_cast<double>(n) * kLog2Pi;
        return true;
    }
    return false;
}

/// Log marginal likelihood without jitter, factorising K in place. NaN when
/// the factorisation fails (K is then clobbered).
double lml_in_place(Eigen::MatrixXd& K, const Eigen::VectorXd& y, double noise) {
    K.diagonal().array() += noise;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(K);
    if (llt.info() != Eigen::Success) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const auto diag = llt.matrixLLT().diagonal();
    if (!(diag.array() > 0.0).all()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const Eigen::VectorXd alpha = llt.solve(y);
    return -0.5 * y.dot(alpha) - diag.array().log().sum() - 0.5 * static_cast<double>(K.rows()) * kLog2Pi;
}

GprModel fit_standardized(const Standardizer& st, const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                          const GprHyperparameters& hyper) {
    GprModel m;
    m.standardizer = st;
    m.hyper = hyper;
    m.training_inputs = xs;
    const Eigen::MatrixXd K = rbf_kernel(xs, xs, hyper.length_scales, hyper.signal_variance);
    Factorized f;
    if (!factorize(K, ys, hyper.noise_variance, f)) {
        throw ConditioningError("kernel matrix is not positive definite even with 1e-6 jitter");
    }
    m.cholesky_factor = std::move(f.L);
    m.alpha = std::move(f.alpha);
    m.jitter = f.jitter;
    m.log_marginal_likelihood = f.lml;
    return m;
}

Eigen::VectorXd standardized_targets(const Standardizer& st, const Eigen::VectorXd& y) {
    if (st.constant_target) {
        return Eigen::VectorXd::Zero(y.size());
    }
    return (y.array() - st.y_mean) / st.y_std;
}

void check_training_data(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
    if (inputs.rows() < 2) {
        throw ArgumentError("GPR needs at least 2 training samples, got " + std::to_string(inputs.rows()));
    }
    if (inputs.rows() != targets.size()) {
        throw ArgumentError("GPR inputs and targets have different row counts");
    }
    if (!inputs.allFinite() || !targets.allFinite()) {
        throw DomainError("GPR training data must be finite");
    }
}

GprHyperparameters from_params(const Eigen::VectorXd& p, double noise) {
    GprHyperparameters h;
    const auto d = p.size() - 1;
    h.length_scales.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        h.length_scales(i) = std::exp(std::clamp(p(i), kLogScaleMin, kLogScaleMax));
    }
    h.signal_variance = std::exp(std::clamp(p(d), kLogSignalMin, kLogSignalMax));
    h.noise_variance = noise;
    return h;
}

/// Plain Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
template <typename F>
std::pair<Eigen::VectorXd, double> nelder_mead(const F& f, const Eigen::VectorXd& start, double step,
                                               std::size_t max_evals) {
    const auto n = start.size();
    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), start);
    std::vector<double> val(static_cast<std::size_t>(n + 1));
    std::size_t evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        return f(x);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        pts[static_cast<std::size_t>(i + 1)](i) += step;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        val[i] = eval(pts[i]);
    }
    std::vector<std::size_t> order(pts.size());
    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
        double spread = 0.0;
        for (const auto& p : pts) {
            spread = std::max(spread, (p - pts[best]).cwiseAbs().maxCoeff());
        }
        if (std::abs(val[worst] - val[best]) <= 1e-10 * (std::abs(val[best]) + 1e-10) && spread < 1e-6) {
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i != worst) {
                centroid += pts[i];
            }
        }
        centroid /= static_cast<double>(n);
        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < val[best]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                val[worst] = fe;
            } else {
                pts[worst] = xr;
                val[worst] = fr;
            }
            continue;
        }
        if (fr < val[second]) {
            pts[worst] = xr;
            val[worst] = fr;
            continue;
        }
        const bool outside = fr < val[worst];
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                           : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : val[worst])) {
            pts[worst] = xc;
            val[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i != best) {
                pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                val[i] = eval(pts[i]);
            }
        }
    }
    const auto it = std::min_element(val.begin(), val.end());
    return {pts[static_cast<std::size_t>(it - val.begin())], *it};
}

/// Row indices sorted lexicographically by (inputs, target).
std::vector<std::size_t> canonical_order(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(x.rows()));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            if (x(ia, c) != x(ib, c)) {
                return x(ia, c) < x(ib, c);
            }
        }
        return y(ia) < y(ib);
    });
    return idx;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::ordered_json model_json(const GprModel& m) {
    nlohmann::ordered_json doc;
    doc["format"] = "thermoharvest-gpr";
    doc["version"] = kGprFormatVersion;
    doc["input_dim"] = m.standardizer.input_dim;
    doc["retained"] = m.standardizer.retained;
    doc["x_mean"] = to_std(m.standardizer.x_mean);
    doc["x_std"] = to_std(m.standardizer.x_std);
    doc["y_mean"] = m.standardizer.y_mean;
    doc["y_std"] = m.standardizer.y_std;
    doc["constant_target"] = m.standardizer.constant_target;
    doc["length_scales"] = to_std(m.hyper.length_scales);
    doc["signal_variance"] = m.hyper.signal_variance;
    doc["noise_variance"] = m.hyper.noise_variance;
    doc["jitter"] = m.jitter;
    doc["log_marginal_likelihood"] = m.log_marginal_likelihood;
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < m.training_inputs.rows(); ++i) {
        rows.push_back(to_std(m.training_inputs.row(i).transpose()));
    }
    doc["training_inputs"] = std::move(rows);
    doc["alpha"] = to_std(m.alpha);
    return doc;
}

GprModel model_from_json(const nlohmann::json& doc) {
    if (doc.value("format", std::string()) != "thermoharvest-gpr") {
        throw ConfigError("not a thermoharvest GPR model document");
    }
    if (doc.value("version", -1) != kGprFormatVersion) {
        throw ConfigError("GPR model version " + doc.value("version", nlohmann::json(-1)).dump() +
                          " does not match supported version " + std::to_string(kGprFormatVersion));
    }
    GprModel m;
    auto& st = m.standardizer;
    st.input_dim = doc.at("input_dim").get<std::size_t>();
    st.retained = doc.at("retained").get<std::vector<std::size_t>>();
    st.x_mean = to_eigen(doc.at("x_mean").get<std::vector<double>>());
    st.x_std = to_eigen(doc.at("x_std").get<std::vector<double>>());
    st.y_mean = doc.at("y_mean").get<double>();
    st.y_std = doc.at("y_std").get<double>();
    st.constant_target = doc.at("constant_target").get<bool>();
    m.hyper.length_scales = to_eigen(doc.at("length_scales").get<std::vector<double>>());
    m.hyper.signal_variance = doc.at("signal_variance").get<double>();
    m.hyper.noise_variance = doc.at("noise_variance").get<double>();
    m.jitter = doc.at("jitter").get<double>();
    m.log_marginal_likelihood = doc.at("log_marginal_likelihood").get<double>();
    const auto rows = doc.at("training_inputs").get<std::vector<std::vector<double>>>();
    const auto d = static_cast<Eigen::Index>(st.retained.size());
    m.training_inputs.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != d) {
            throw ConfigError("GPR training row " + std::to_string(i) + " has the wrong width");
        }
        m.training_inputs.row(static_cast<Eigen::Index>(i)) = to_eigen(rows[i]).transpose();
    }
    m.alpha = to_eigen(doc.at("alpha").get<std::vector<double>>());
    if (m.alpha.size() != m.training_inputs.rows() || st.x_mean.size() != d || st.x_std.size() != d ||
        m.hyper.length_scales.size() != d) {
        throw ConfigError("GPR model document has inconsistent dimensions");
    }
    Eigen::MatrixXd A = rbf_kernel(m.training_inputs, m.training_inputs, m.hyper.length_scales,
                                   m.hyper.signal_variance);
    A.diagonal().array() += m.hyper.noise_variance + m.jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("stored GPR model no longer factorizes");
    }
    m.cholesky_factor = llt.matrixL();
    return m;
}

}  // namespace

Standardizer Standardizer::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
    Standardizer s;
    s.input_dim = static_cast<std::size_t>(inputs.cols());
    const double n = static_cast<double>(inputs.rows());
    std::vector<double> means, stds;
    for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
        const double mean = inputs.col(c).mean();
        const double sd = std::sqrt((inputs.col(c).array() - mean).square().sum() / n);
        if (sd > 0.0 && sd > 1e-12 * std::abs(mean)) {
            s.retained.push_back(static_cast<std::size_t>(c));
            means.push_back(mean);
            stds.push_back(sd);
        }
    }
    s.x_mean = to_eigen(means);
    s.x_std = to_eigen(stds);
    s.y_mean = targets.mean();
    const double ysd = std::sqrt((targets.array() - s.y_mean).square().sum() / n);
    if (ysd > 0.0 && ysd > 1e-12 * std::abs(s.y_mean)) {
        s.y_std = ysd;
    } else {
        s.y_std = 1.0;
        s.constant_target = true;
    }
    return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& inputs) const {
    if (static_cast<std::size_t>(inputs.cols()) != input_dim) {
        throw ArgumentError("expected " + std::to_string(input_dim) + " input columns, got " +
                            std::to_string(inputs.cols()));
    }
    Eigen::MatrixXd out(inputs.rows(), static_cast<Eigen::Index>(retained.size()));
    for (std::size_t j = 0; j < retained.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out.col(jj) = (inputs.col(static_cast<Eigen::Index>(retained[j])).array() - x_mean(jj)) / x_std(jj);
    }
    return out;
}

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& length_scales,
                           double signal_variance) {
    const Eigen::RowVectorXd inv = length_scales.cwiseInverse().transpose();
    const Eigen::MatrixXd as = a.array().rowwise() * inv.array();
    const Eigen::MatrixXd bs = b.array().rowwise() * inv.array();
    const Eigen::VectorXd an = as.rowwise().squaredNorm();
    const Eigen::VectorXd bn = bs.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * as * bs.transpose();
    d2.colwise() += an;
    d2.rowwise() += bn.transpose();
    return signal_variance * (-0.5 * d2.array().max(0.0)).exp().matrix();
}

GprModel gpr_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, double noise_variance,
                 const Eigen::VectorXd& length_scales, double signal_variance) {
    check_training_data(inputs, targets);
    if (!(noise_variance > 0.0)) {
        throw ArgumentError("noise variance must be positive");
    }
    if (length_scales.size() != inputs.cols() || !(length_scales.array() > 0.0).all()) {
        throw ArgumentError("need one positive length scale per input column");
    }
    if (!(signal_variance > 0.0)) {
        throw ArgumentError("signal variance must be positive");
    }
    const auto st = Standardizer::fit(inputs, targets);
    GprHyperparameters h;
    h.length_scales.resize(static_cast<Eigen::Index>(st.retained.size()));
    for (std::size_t j = 0; j < st.retained.size(); ++j) {
        h.length_scales(static_cast<Eigen::Index>(j)) = length_scales(static_cast<Eigen::Index>(st.retained[j]));
    }
    h.signal_variance = signal_variance;
    h.noise_variance = noise_variance;
    return fit_standardized(st, st.transform(inputs), standardized_targets(st, targets), h);
}

GprPrediction gpr_predict(const GprModel& model, const Eigen::VectorXd& x) {
    Eigen::VectorXd mean, var;
    gpr_predict_batch(model, x.transpose(), mean, &var);
    return {mean(0), var(0)};
}

void gpr_predict_batch(const GprModel& model, const Eigen::MatrixXd& inputs, Eigen::VectorXd& mean,
                       Eigen::VectorXd* variance) {
    if (static_cast<std::size_t>(inputs.cols()) != model.input_dim()) {
        throw ArgumentError("prediction input has " + std::to_string(inputs.cols()) + " columns, model expects " +
                            std::to_string(model.input_dim()));
    }
    if (!inputs.allFinite()) {
        throw DomainError("prediction inputs must be finite");
    }
    const auto& st = model.standardizer;
    const Eigen::MatrixXd xs = st.transform(inputs);
    const Eigen::MatrixXd ks = rbf_kernel(xs, model.training_inputs, model.hyper.length_scales,
                                          model.hyper.signal_variance);
    mean = ((ks * model.alpha).array() * st.y_std + st.y_mean).matrix();
    if (st.constant_target) {
        mean.setConstant(st.y_mean);
    }
    if (variance) {
        const Eigen::MatrixXd v = model.cholesky_factor.triangularView<Eigen::Lower>().solve(ks.transpose());
        Eigen::VectorXd latent = model.hyper.signal_variance - v.colwise().squaredNorm().transpose().array();
        *variance = (latent.array().max(0.0) * st.y_std * st.y_std).matrix();
        if (st.constant_target) {
            variance->setZero();
        }
    }
}

GprModel tune_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                              const TuneOptions& options) {
    if (options.restarts < 1) {
        throw ArgumentError("hyperparameter tuning needs restarts >= 1");
    }
    check_training_data(inputs, targets);
    if (!(options.noise_variance > 0.0)) {
        throw ArgumentError("noise variance must be positive");
    }
    const auto st = Standardizer::fit(inputs, targets);
    const Eigen::MatrixXd xs = st.transform(inputs);
    const Eigen::VectorXd ys = standardized_targets(st, targets);
    const auto d = static_cast<Eigen::Index>(st.retained.size());
    if (st.constant_target) {
        GprHyperparameters h;
        h.length_scales = Eigen::VectorXd::Constant(d, 1.0);
        h.noise_variance = options.noise_variance;
        return fit_standardized(st, xs, ys, h);
    }

    Eigen::MatrixXd sx = xs;
    Eigen::VectorXd sy = ys;
    if (options.max_rows >= 2 && static_cast<std::size_t>(xs.rows()) > options.max_rows) {
        std::vector<std::size_t> rows(static_cast<std::size_t>(xs.rows()));
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        RandomStream rng(derive_seed(options.seed, "tune_subset"));
        rng.shuffle(rows);
        rows.resize(options.max_rows);
        std::sort(rows.begin(), rows.end());
        sx = take_rows(xs, rows);
        sy = take(ys, rows);
    }

    auto objective = [&](const Eigen::VectorXd& p) {
        const auto h = from_params(p, options.noise_variance);
        Eigen::MatrixXd K = rbf_kernel(sx, sx, h.length_scales, h.signal_variance);
        const double fast = lml_in_place(K, sy, h.noise_variance);
        if (!std::isnan(fast)) {
            return -fast;
        }
        Factorized f;
        if (!factorize(rbf_kernel(sx, sx, h.length_scales, h.signal_variance), sy, h.noise_variance, f)) {
            return std::numeric_limits<double>::infinity();
        }
        return -f.lml;
    };

    // Warm start: one shared length scale and the signal variance, then the
    // full per-dimension search from there.
    auto isotropic = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd p(d + 1);
        p.head(d).setConstant(q(0));
        p(d) = q(1);
        return objective(p);
    };
    Eigen::VectorXd q0(2);
    q0 << std::log(std::sqrt(static_cast<double>(std::max<Eigen::Index>(d, 1)))), 0.0;
    const auto iso = nelder_mead(isotropic, q0, 1.0, 80).first;
    Eigen::VectorXd base(d + 1);
    base.head(d).setConstant(iso(0));
    base(d) = iso(1);

    Eigen::VectorXd best_p;
    double best_f = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < options.restarts; ++r) {
        Eigen::VectorXd start = base;
        if (r > 0) {
            RandomStream rng(derive_seed(options.seed, r, 0x7475));
            for (Eigen::Index i = 0; i <= d; ++i) {
                start(i) += rng.uniform(-1.0, 1.0);
            }
        }
        auto [p, f] = nelder_mead(objective, start, 0.5, options.max_evaluations);
        if (f < best_f) {
            best_f = f;
            best_p = p;
        }
    }
    if (!std::isfinite(best_f)) {
        throw ConditioningError("every hyperparameter restart failed to factorize the kernel");
    }
    return fit_standardized(st, xs, ys, from_params(best_p, options.noise_variance));
}

double rmse(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    if (y_true.empty() || y_true.size() != y_pred.size()) {
        throw ArgumentError("metrics need equal, non-zero lengths");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ss += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    }
    return std::sqrt(ss / static_cast<double>(y_true.size()));
}

RegressionMetrics regression_metrics(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    RegressionMetrics m;
    m.rmse = rmse(y_true, y_pred);
    const double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) / static_cast<double>(y_true.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
        ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    }
    if (ss_tot == 0.0) {
        throw DomainError("R^2 is undefined for a constant y_true (RMSE = " + format_double(m.rmse) + ")");
    }
    m.r_squared = 1.0 - ss_res / ss_tot;
    return m;
}

RegressionMetrics cross_validate(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                 const CvOptions& options) {
    const auto n = static_cast<std::size_t>(inputs.rows());
    if (targets.size() != inputs.rows()) {
        throw ArgumentError("inputs and targets have different row counts");
    }
    if (options.folds < 2 || options.folds > n) {
        throw ArgumentError("folds must lie in [2, " + std::to_string(n) + "], got " + std::to_string(options.folds));
    }
    const auto canon = canonical_order(inputs, targets);
    const Eigen::MatrixXd x = take_rows(inputs, canon);
    const Eigen::VectorXd y = take(targets, canon);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    RandomStream rng(derive_seed(options.seed, "cv_folds"));
    rng.shuffle(perm);
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        fold_of[perm[i]] = i % options.folds;
    }

    std::vector<double> y_true, y_pred;
    for (std::size_t k = 0; k < options.folds; ++k) {
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < n; ++i) {
            (fold_of[i] == k ? test : train).push_back(i);
        }
        if (train.size() < 2) {
            throw ArgumentError("fold " + std::to_string(k) + " leaves fewer than 2 training rows");
        }
        auto tune = options.tune;
        tune.seed = derive_seed(options.seed, k, 0x6376);
        const auto model = tune_hyperparameters(take_rows(x, train), take(y, train), tune);
        Eigen::VectorXd mean;
        gpr_predict_batch(model, take_rows(x, test), mean);
        for (std::size_t i = 0; i < test.size(); ++i) {
            y_true.push_back(y(static_cast<Eigen::Index>(test[i])));
            y_pred.push_back(mean(static_cast<Eigen::Index>(i)));
        }
    }
    return regression_metrics(y_true, y_pred);
}

Eigen::MatrixXd design_matrix(const std::vector<DesignPoint>& designs) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(designs.size()), static_cast<Eigen::Index>(kDesignVariableCount));
    for (std::size_t i = 0; i < designs.size(); ++i) {
        const auto v = designs[i].to_vector();
        for (std::size_t j = 0; j < kDesignVariableCount; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
        }
    }
    return x;
}

Eigen::VectorXd target_vector(const Dataset& dataset, const std::string& target) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(dataset.metrics.size()));
    for (std::size_t i = 0; i < dataset.metrics.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) = metric_value(dataset.metrics[i], target);
    }
    return y;
}

RegressionMetrics cross_validate(const Dataset& dataset, const std::string& target, const CvOptions& options) {
    return cross_validate(design_matrix(dataset.designs), target_vector(dataset, target), options);
}

std::string gpr_to_json(const GprModel& model) { return model_json(model).dump(); }

GprModel gpr_from_json(const std::string& text) {
    try {
        return model_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed GPR model document: ") + e.what());
    }
}

SurrogateBundle train_surrogate(const Dataset& dataset, const std::vector<std::string>& targets,
                                const CvOptions& options, std::size_t workers) {
    if (targets.empty()) {
        throw ArgumentError("train_surrogate needs at least one target");
    }
    const Eigen::MatrixXd x = design_matrix(dataset.designs);
    std::vector<GprModel> models(targets.size());
    std::vector<RegressionMetrics> scores(targets.size());
    parallel_for(targets.size(), workers, [&](std::size_t t) {
        const Eigen::VectorXd y = target_vector(dataset, targets[t]);
        auto cv = options;
        cv.seed = derive_seed(options.seed, targets[t]);
        scores[t] = cross_validate(x, y, cv);
        auto tune = options.tune;
        tune.seed = derive_seed(cv.seed, "final");
        models[t] = tune_hyperparameters(x, y, tune);
    });
    SurrogateBundle b;
    b.ledger_version = dataset.ledger_version;
    b.seed = options.seed;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        b.models[targets[t]] = std::move(models[t]);
        b.cv[targets[t]] = scores[t];
    }
    return b;
}

std::string surrogate_to_json(const SurrogateBundle& bundle) {
    nlohmann::ordered_json doc;
    doc["format"] = "thermoharvest-surrogate";
    doc["version"] = kGprFormatVersion;
    doc["artifact_version"] = kArtifactVersion;
    doc["ledger_version"] = bundle.ledger_version;
    doc["seed"] = bundle.seed;
    nlohmann::ordered_json cv, models;
    for (const auto& [name, m] : bundle.cv) {
        cv[name] = {{"r_squared", m.r_squared}, {"rmse", m.rmse}};
    }
    for (const auto& [name, m] : bundle.models) {
        models[name] = model_json(m);
    }
    doc["cv"] = cv;
    doc["models"] = models;
    return doc.dump() + "\n";
}

SurrogateBundle surrogate_from_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.value("format", std::string()) != "thermoharvest-surrogate") {
            throw ConfigError("not a thermoharvest surrogate document");
        }
        if (doc.value("version", -1) != kGprFormatVersion) {
            throw ConfigError("surrogate document version " + doc.value("version", nlohmann::json(-1)).dump() +
                              " does not match supported version " + std::to_string(kGprFormatVersion));
        }
        SurrogateBundle b;
        b.ledger_version = doc.value("ledger_version", std::string());
        b.seed = doc.value("seed", std::uint64_t{0});
        for (const auto& [name, m] : doc.at("cv").items()) {
            b.cv[name] = {m.at("r_squared").get<double>(), m.at("rmse").get<double>()};
        }
        for (const auto& [name, m] : doc.at("models").items()) {
            b.models[name] = model_from_json(m);
        }
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed surrogate document: ") + e.what());
    }
}

}  // namespace thermoharvest
