#include "lutbench/gpr.hpp"

#include "lutbench/errors.hpp"
#include "lutbench/rng.hpp"
#include "se_kernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>

namespace lutbench {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Rows of `x` divided by the length-scales.
Matrix scaled_inputs(const GpHyper& h, const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t d = 0; d < x.cols(); ++d) {
        const double inv = 1.0 / h.length(d);
        for (std::size_t i = 0; i < x.rows(); ++i) out(i, d) = x(i, d) * inv;
    }
    return out;
}

/// Scaled inputs transposed to dims x n, the layout se_kernel_row expects.
Matrix scaled_transposed(const GpHyper& h, const Matrix& x) {
    Matrix out(x.cols(), x.rows());
    for (std::size_t d = 0; d < x.cols(); ++d) {
        const double inv = 1.0 / h.length(d);
        for (std::size_t i = 0; i < x.rows(); ++i) out(d, i) = x(i, d) * inv;
    }
    return out;
}

void check_hyper(const GpHyper& h, const Matrix& x) {
    if (h.theta.size() != x.cols() + 2)
        throw DimensionMismatch("hyperparameters have " + std::to_string(h.theta.size()) +
                                " entries for " + std::to_string(x.cols()) + " input dimensions");
}

/// Cholesky of k + (noise + jitter) I, escalating the jitter on failure.
Matrix factor_with_jitter(Matrix k, double noise, double& jitter) {
    const std::size_t n = k.rows();
    for (std::size_t i = 0; i < n; ++i) k(i, i) += noise;
    double applied = 0.0;
    double next = jitter > 0.0 ? jitter : 0.0;
    for (;;) {
        if (next != applied) {
            for (std::size_t i = 0; i < n; ++i) k(i, i) += next - applied;
            applied = next;
        }
        try {
            Matrix l = cholesky(k);
            jitter = applied;
            return l;
        } catch (const NotPositiveDefinite&) {
            next = applied == 0.0 ? 1e-10 : applied * 10.0;
            if (next > kMaxJitter * (1.0 + 1e-9))
                throw NotPositiveDefinite("kernel matrix not positive definite with jitter up to 1e-4");
        }
    }
}

}  // namespace

// --- PCA --------------------------------------------------------------------

PcaModel fit_pca(const Matrix& spectra, std::size_t p) {
    const std::size_t n = spectra.rows();
    const std::size_t k_count = spectra.cols();
    if (p == 0 || n <= p)
        throw RankDeficient("PCA needs n > p >= 1 (n=" + std::to_string(n) +
                            ", p=" + std::to_string(p) + ")");
    if (p > k_count) throw RankDeficient("more components requested than wavelengths");

    PcaModel pca;
    pca.mean.assign(k_count, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < k_count; ++k) pca.mean[k] += spectra(i, k);
    for (double& m : pca.mean) m /= static_cast<double>(n);

    Matrix centered(n, k_count);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < k_count; ++k) {
            const double v = spectra(i, k) - pca.mean[k];
            centered(i, k) = v;
            total += v * v;
        }
    const double denom = static_cast<double>(n - 1);
    total /= denom;

    std::vector<double> values;
    pca.basis = Matrix(k_count, p);
    if (n >= k_count) {
        Matrix cov(k_count, k_count);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = centered.row(i);
            for (std::size_t a = 0; a < k_count; ++a) {
                const double ra = r[a];
                double* ca = cov.row(a).data();
                for (std::size_t b = a; b < k_count; ++b) ca[b] += ra * r[b];
            }
        }
        for (std::size_t a = 0; a < k_count; ++a)
            for (std::size_t b = a; b < k_count; ++b) {
                cov(a, b) /= denom;
                cov(b, a) = cov(a, b);
            }
        const auto eig = sym_eigen(cov);
        values = eig.values;
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < k_count; ++k) pca.basis(k, j) = eig.vectors(k, j);
    } else {
        Matrix gram(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b <= a; ++b) {
                const double g = dot(centered.row(a), centered.row(b)) / denom;
                gram(a, b) = g;
                gram(b, a) = g;
            }
        const auto eig = sym_eigen(gram);
        values = eig.values;
        for (std::size_t j = 0; j < p && values[j] > 0.0; ++j) {
            const double norm = std::sqrt(values[j] * denom);
            for (std::size_t k = 0; k < k_count; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += centered(i, k) * eig.vectors(i, j);
                pca.basis(k, j) = s / norm;
            }
        }
    }

    if (!(values[0] > 0.0) || !(values[p - 1] > 1e-12 * values[0]))
        throw RankDeficient("fewer than " + std::to_string(p) + " positive eigenvalues");

    // Deterministic sign: largest-magnitude loading positive.
    for (std::size_t j = 0; j < p; ++j) {
        std::size_t arg = 0;
        for (std::size_t k = 1; k < k_count; ++k)
            if (std::abs(pca.basis(k, j)) > std::abs(pca.basis(arg, j))) arg = k;
        if (pca.basis(arg, j) < 0.0)
            for (std::size_t k = 0; k < k_count; ++k) pca.basis(k, j) = -pca.basis(k, j);
    }
    pca.explained.resize(p);
    for (std::size_t j = 0; j < p; ++j) pca.explained[j] = values[j] / total;
    return pca;
}

Matrix project(const PcaModel& pca, const Matrix& spectra) {
    const std::size_t k_count = pca.mean.size();
    if (spectra.cols() != k_count) throw DimensionMismatch("spectra length differs from PCA mean");
    const std::size_t p = pca.components();
    Matrix scores(spectra.rows(), p);
    std::vector<double> centered(k_count);
    for (std::size_t i = 0; i < spectra.rows(); ++i) {
        for (std::size_t k = 0; k < k_count; ++k) centered[k] = spectra(i, k) - pca.mean[k];
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < k_count; ++k) s += centered[k] * pca.basis(k, j);
            scores(i, j) = s;
        }
    }
    return scores;
}

Matrix reconstruct(const PcaModel& pca, const Matrix& scores) {
    const std::size_t p = pca.components();
    if (scores.cols() != p) throw DimensionMismatch("score width differs from component count");
    const std::size_t k_count = pca.mean.size();
    Matrix out(scores.rows(), k_count);
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        auto o = out.row(i);
        std::copy(pca.mean.begin(), pca.mean.end(), o.begin());
        for (std::size_t j = 0; j < p; ++j) {
            const double s = scores(i, j);
            for (std::size_t k = 0; k < k_count; ++k) o[k] += s * pca.basis(k, j);
        }
    }
    return out;
}

// --- GP kernel and likelihood -------------------------------------------------

GpHyper GpHyper::from_values(double signal_var, std::span<const double> lengths, double noise_var) {
    GpHyper h;
    h.theta.push_back(std::log(signal_var));
    for (double l : lengths) h.theta.push_back(std::log(l));
    h.theta.push_back(std::log(noise_var));
    return h;
}

double GpHyper::signal_var() const { return std::exp(theta.front()); }
double GpHyper::noise_var() const { return std::exp(theta.back()); }
double GpHyper::length(std::size_t d) const { return std::exp(theta[d + 1]); }

void clamp_hyper(GpHyper& h) {
    h.theta.front() = std::clamp(h.theta.front(), std::log(kMinSignalVar), std::log(kMaxSignalVar));
    for (std::size_t d = 0; d < h.dims(); ++d)
        h.theta[d + 1] = std::clamp(h.theta[d + 1], std::log(kMinLength), std::log(kMaxLength));
    h.theta.back() = std::clamp(h.theta.back(), std::log(kMinNoiseVar), std::log(kMaxNoiseVar));
}

Matrix cross_kernel_serial(const GpHyper& h, const Matrix& a, const Matrix& b) {
    check_hyper(h, a);
    const Matrix sa = scaled_inputs(h, a);
    const Matrix sbt = scaled_transposed(h, b);
    const double sf2 = h.signal_var();
    Matrix k(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out = k.row(i);
        detail::se_kernel_row(sa.row(i).data(), sbt.data().data(), a.cols(), b.rows(), out.data());
        for (double& v : out) v *= sf2;
    }
    return k;
}

Matrix cross_kernel(const GpHyper& h, const Matrix& a, const Matrix& b) {
    check_hyper(h, a);
    const Matrix sa = scaled_inputs(h, a);
    const Matrix sbt = scaled_transposed(h, b);
    const double sf2 = h.signal_var();
    Matrix k(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(a.rows()); ++i) {
        auto out = k.row(static_cast<std::size_t>(i));
        detail::se_kernel_row(sa.row(static_cast<std::size_t>(i)).data(), sbt.data().data(), a.cols(), b.rows(),
                              out.data());
        for (double& v : out) v *= sf2;
    }
    return k;
}

LmlResult log_marginal_likelihood(const GpHyper& h, const Matrix& x, std::span<const double> z,
                                  bool with_gradient) {
    check_hyper(h, x);
    const std::size_t n = x.rows();
    if (z.size() != n) throw DimensionMismatch("targets length differs from input rows");
    const std::size_t dims = x.cols();

    const Matrix kf = cross_kernel(h, x, x);
    const double sn2 = h.noise_var();
    LmlResult res;
    const Matrix l = factor_with_jitter(kf, sn2, res.jitter);
    const auto alpha = solve_cholesky(l, z);

    res.value = -0.5 * dot(z, alpha) - 0.5 * cholesky_log_det(l) -
                0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    if (!with_gradient) return res;

    const Matrix kinv = cholesky_inverse(l);
    res.gradient.assign(dims + 2, 0.0);
    std::vector<double> inv_l2(dims);
    for (std::size_t d = 0; d < dims; ++d) inv_l2[d] = 1.0 / (h.length(d) * h.length(d));

    double g_sf = 0.0;
    double trace_w = 0.0;
    std::vector<double> g_len(dims, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x.row(i);
        const double wii = alpha[i] * alpha[i] - kinv(i, i);
        trace_w += wii;
        g_sf += wii * kf(i, i);
        for (std::size_t j = 0; j < i; ++j) {
            const double w = 2.0 * (alpha[i] * alpha[j] - kinv(i, j)) * kf(i, j);
            g_sf += w;
            const auto xj = x.row(j);
            for (std::size_t d = 0; d < dims; ++d) {
                const double e = xi[d] - xj[d];
                g_len[d] += w * e * e;
            }
        }
    }
    res.gradient[0] = 0.5 * g_sf;
    for (std::size_t d = 0; d < dims; ++d) res.gradient[d + 1] = 0.5 * g_len[d] * inv_l2[d];
    res.gradient[dims + 1] = 0.5 * sn2 * trace_w;
    return res;
}

// --- training -----------------------------------------------------------------

void TrainConfig::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidConfig("train fraction must be in (0, 1)");
    if (n_components < 1) throw InvalidConfig("need at least one PCA component");
    if (restarts < 1) throw InvalidConfig("need at least one optimizer restart");
    if (max_iterations < 0) throw InvalidConfig("iteration cap must be non-negative");
    if (hyper_subset < 2) throw InvalidConfig("hyperparameter subset must hold at least 2 rows");
}

void GprComponent::factorize() {
    const Matrix kf = cross_kernel(hyper, inputs, inputs);
    double j = jitter;
    chol = factor_with_jitter(kf, hyper.noise_var(), j);
    jitter = j;
    alpha = solve_cholesky(chol, targets);
    lml = -0.5 * dot(targets, alpha) - 0.5 * cholesky_log_det(chol) -
          0.5 * static_cast<double>(targets.size()) * std::log(2.0 * std::numbers::pi);
}

namespace {

struct AscentResult {
    GpHyper hyper;
    double value = -std::numeric_limits<double>::infinity();
    bool ok = false;
};

/// Limited-memory BFGS ascent in log-space. Coordinates pinned at a bound
/// with the gradient pointing outwards are frozen for the step; trial points
/// are clamped into the box and accepted by an Armijo test.
AscentResult lbfgs_ascent(GpHyper h, const Matrix& x, std::span<const double> z, int max_iter) {
    constexpr std::size_t kMemory = 6;
    clamp_hyper(h);
    const std::size_t m = h.theta.size();
    std::vector<double> lo(m, std::log(kMinLength));
    std::vector<double> hi(m, std::log(kMaxLength));
    lo.front() = std::log(kMinSignalVar);
    hi.front() = std::log(kMaxSignalVar);
    lo.back() = std::log(kMinNoiseVar);
    hi.back() = std::log(kMaxNoiseVar);

    AscentResult out;
    LmlResult cur;
    try {
        cur = log_marginal_likelihood(h, x, z);
    } catch (const NotPositiveDefinite&) {
        return out;
    }
    out.ok = true;

    std::vector<std::vector<double>> s_hist;
    std::vector<std::vector<double>> y_hist;
    std::vector<double> free(m);
    int stalled = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        // Work with the minimization gradient g = -grad f.
        std::vector<double> g(m);
        for (std::size_t i = 0; i < m; ++i) {
            g[i] = -cur.gradient[i];
            const bool pinned = (h.theta[i] <= lo[i] && g[i] > 0.0) || (h.theta[i] >= hi[i] && g[i] < 0.0);
            free[i] = pinned ? 0.0 : 1.0;
            g[i] *= free[i];
        }
        if (std::sqrt(dot(g, g)) < 1e-5) break;

        std::vector<double> d(g);
        const std::size_t mem = s_hist.size();
        std::vector<double> a(mem);
        for (std::size_t j = mem; j-- > 0;) {
            a[j] = dot(s_hist[j], d) / dot(y_hist[j], s_hist[j]);
            for (std::size_t i = 0; i < m; ++i) d[i] -= a[j] * y_hist[j][i];
        }
        const double gamma =
            mem ? dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back())
                : std::min(1.0, 1.0 / std::sqrt(dot(g, g)));
        for (double& v : d) v *= gamma;
        for (std::size_t j = 0; j < mem; ++j) {
            const double b = dot(y_hist[j], d) / dot(y_hist[j], s_hist[j]);
            for (std::size_t i = 0; i < m; ++i) d[i] += (a[j] - b) * s_hist[j][i];
        }
        for (std::size_t i = 0; i < m; ++i) d[i] = -d[i] * free[i];
        if (!(dot(d, g) < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            for (std::size_t i = 0; i < m; ++i) d[i] = -g[i] * gamma;
        }

        bool accepted = false;
        double step = 1.0;
        GpHyper trial;
        LmlResult next;
        std::vector<double> delta(m);
        for (int bt = 0; bt < 30; ++bt) {
            trial = h;
            for (std::size_t i = 0; i < m; ++i) trial.theta[i] = h.theta[i] + step * d[i];
            clamp_hyper(trial);
            for (std::size_t i = 0; i < m; ++i) delta[i] = trial.theta[i] - h.theta[i];
            if (dot(delta, delta) < 1e-24) break;
            try {
                next = log_marginal_likelihood(trial, x, z);
                if (std::isfinite(next.value) && next.value >= cur.value - 1e-4 * dot(g, delta)) {
                    accepted = true;
                    break;
                }
            } catch (const NotPositiveDefinite&) {
            }
            step *= 0.5;
        }
        if (!accepted) break;

        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) y[i] = cur.gradient[i] - next.gradient[i];
        const double gain = next.value - cur.value;
        h = trial;
        cur = std::move(next);
        if (dot(delta, y) > 1e-12 * std::sqrt(dot(delta, delta) * dot(y, y))) {
            s_hist.push_back(delta);
            y_hist.push_back(y);
            if (s_hist.size() > kMemory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
            }
        }
        stalled = gain < 1e-9 * (1.0 + std::abs(cur.value)) ? stalled + 1 : 0;
        if (stalled >= 2) break;
    }
    out.hyper = h;
    out.value = cur.value;
    return out;
}

double variance_of(std::span<const double> z) {
    if (z.empty()) return 0.0;
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double s = 0.0;
    for (double v : z) s += (v - mean) * (v - mean);
    return s / static_cast<double>(z.size());
}

}  // namespace

GprComponent train_component(const Matrix& x, std::span<const double> z, const TrainConfig& cfg,
                             std::uint64_t stream) {
    cfg.validate();
    const std::size_t n = x.rows();
    const std::size_t dims = x.cols();
    if (z.size() != n) throw DimensionMismatch("targets length differs from input rows");
    if (n < dims + 2)
        throw InvalidConfig("GP training needs at least D + 2 = " + std::to_string(dims + 2) + " rows");

    const std::size_t sub_n = std::min(n, cfg.hyper_subset);
    std::vector<std::size_t> sub_rows(sub_n);
    std::iota(sub_rows.begin(), sub_rows.end(), std::size_t{0});
    const Matrix xs = sub_n == n ? x : x.select_rows(sub_rows);
    const std::span<const double> zs = z.first(sub_n);

    const double var = variance_of(z);
    CounterRng rng(CounterRng::derive(CounterRng::derive(cfg.seed, "gp-restarts"), stream));
    AscentResult best;
    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<double> lengths(dims);
        for (double& l : lengths) l = std::exp(rng.uniform(std::log(0.1), std::log(3.0)));
        GpHyper init = GpHyper::from_values(std::max(var, kMinSignalVar), lengths,
                                            std::max(1e-6 * var, kMinNoiseVar));
        const auto res = lbfgs_ascent(init, xs, zs, cfg.max_iterations);
        if (res.ok && (!best.ok || res.value > best.value)) best = res;
    }
    if (!best.ok) throw OptimizationFailed("every optimizer restart failed");

    GprComponent comp;
    comp.inputs = x;
    comp.targets.assign(z.begin(), z.end());
    comp.hyper = best.hyper;
    comp.factorize();
    return comp;
}

namespace {

double mean_at(const GprComponent& comp, const double* qs, const Matrix& sxt, std::vector<double>& buf) {
    detail::se_kernel_row(qs, sxt.data().data(), sxt.rows(), sxt.cols(), buf.data());
    double s = 0.0;
    for (std::size_t j = 0; j < buf.size(); ++j) s += comp.alpha[j] * buf[j];
    return comp.hyper.signal_var() * s;
}

}  // namespace

std::vector<double> predict_mean_serial(const GprComponent& comp, const Matrix& q) {
    check_hyper(comp.hyper, q);
    const Matrix sxt = scaled_transposed(comp.hyper, comp.inputs);
    const Matrix sq = scaled_inputs(comp.hyper, q);
    std::vector<double> out(q.rows());
    std::vector<double> buf(comp.inputs.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) out[i] = mean_at(comp, sq.row(i).data(), sxt, buf);
    return out;
}

std::vector<double> predict_mean(const GprComponent& comp, const Matrix& q) {
    check_hyper(comp.hyper, q);
    const Matrix sxt = scaled_transposed(comp.hyper, comp.inputs);
    const Matrix sq = scaled_inputs(comp.hyper, q);
    std::vector<double> out(q.rows());
#pragma omp parallel
    {
        std::vector<double> buf(comp.inputs.rows());
#pragma omp for schedule(static)
        for (long i = 0; i < static_cast<long>(q.rows()); ++i)
            out[static_cast<std::size_t>(i)] = mean_at(comp, sq.row(static_cast<std::size_t>(i)).data(), sxt, buf);
    }
    return out;
}

std::vector<double> predict_variance(const GprComponent& comp, const Matrix& q) {
    const Matrix ks = cross_kernel(comp.hyper, q, comp.inputs);
    const double sf2 = comp.hyper.signal_var();
    std::vector<double> out(q.rows());
    std::vector<double> v(comp.inputs.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        const auto k = ks.row(i);
        std::copy(k.begin(), k.end(), v.begin());
        solve_lower_inplace(comp.chol, v);
        out[i] = std::max(0.0, sf2 - dot(v, v));
    }
    return out;
}

// --- emulator -------------------------------------------------------------------

Matrix EmulatorModel::normalize_inputs(const Matrix& q) const {
    if (q.cols() != input_offset.size())
        throw DimensionMismatch("query has " + std::to_string(q.cols()) + " columns, model expects " +
                                std::to_string(input_offset.size()));
    Matrix out(q.rows(), q.cols());
    for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t d = 0; d < q.cols(); ++d)
            out(i, d) = (q(i, d) - input_offset[d]) / input_scale[d];
    return out;
}

namespace {

template <typename MeanFn>
PredictResult predict_impl(const EmulatorModel& model, const Matrix& q, MeanFn mean_fn) {
    for (double v : q.data())
        if (!std::isfinite(v)) throw NonFiniteInput("query matrix has non-finite entries");
    PredictResult res;
    if (q.rows() == 0) {
        res.spectra = Matrix(0, model.grid.size());
        return res;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const Matrix qn = model.normalize_inputs(q);
    for (std::size_t i = 0; i < qn.rows(); ++i) {
        const auto r = qn.row(i);
        if (std::any_of(r.begin(), r.end(), [](double v) { return v < 0.0 || v > 1.0; }))
            ++res.out_of_bounds;
    }
    const std::size_t p = model.components.size();
    Matrix scores(q.rows(), p);
    for (std::size_t c = 0; c < p; ++c) {
        const auto mu = mean_fn(model.components[c], qn);
        for (std::size_t i = 0; i < q.rows(); ++i)
            scores(i, c) = model.score_mean[c] + model.score_std[c] * mu[i];
    }
    res.spectra = reconstruct(model.pca, scores);
    res.seconds = seconds_since(t0);
    return res;
}

ValidationSummary validation_summary(const EmulatorModel& model, const Lut& lut) {
    ValidationSummary v;
    v.rows = model.valid_rows.size();
    const Matrix xv = lut.design.points.select_rows(model.valid_rows);
    const Matrix fv = lut.spectra.select_rows(model.valid_rows);
    const auto pred = predict(model, xv);
    MethodOutput out{"validation", lut.size(), model.components.size(), pred.spectra, 0.0, 0.0};
    const auto rep = compare(fv, lut.grid.wavelengths(), out);
    v.rmse_mean = rep.rmse_mean;
    v.nrmse_mean = rep.nrmse_mean;

    // Spectral posterior sd: sqrt(sum_c (basis_kc * std_c)^2 var_c).
    const std::size_t sample = std::min(kVarianceSample, xv.rows());
    std::vector<std::size_t> rows(sample);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const Matrix qn = model.normalize_inputs(xv.select_rows(rows));
    const std::size_t k_count = model.grid.size();
    Matrix var(sample, k_count);
    for (std::size_t c = 0; c < model.components.size(); ++c) {
        const auto vc = predict_variance(model.components[c], qn);
        for (std::size_t i = 0; i < sample; ++i)
            for (std::size_t k = 0; k < k_count; ++k) {
                const double b = model.pca.basis(k, c) * model.score_std[c];
                var(i, k) += b * b * vc[i];
            }
    }
    double s = 0.0;
    for (double x : var.data()) s += std::sqrt(x);
    v.mean_predictive_sd = var.data().empty() ? 0.0 : s / static_cast<double>(var.data().size());
    return v;
}

}  // namespace

PredictResult predict(const EmulatorModel& model, const Matrix& q) {
    return predict_impl(model, q, [](const GprComponent& c, const Matrix& x) { return predict_mean(c, x); });
}

PredictResult predict_serial(const EmulatorModel& model, const Matrix& q) {
    return predict_impl(model, q,
                        [](const GprComponent& c, const Matrix& x) { return predict_mean_serial(c, x); });
}

std::vector<EmulatorModel> train_emulator_family(const Lut& lut, const TrainConfig& cfg,
                                                 std::span<const std::size_t> ps) {
    cfg.validate();
    if (ps.empty()) throw InvalidConfig("no component counts requested");
    const std::size_t p_max = *std::max_element(ps.begin(), ps.end());
    if (*std::min_element(ps.begin(), ps.end()) < 1) throw InvalidConfig("component count must be >= 1");

    const std::size_t n = lut.size();
    const std::size_t dims = lut.design.dims();
    if (n < 20) throw InvalidConfig("emulator training needs a LUT with at least 20 rows");
    const auto n_valid = static_cast<std::size_t>(
        std::floor((1.0 - cfg.train_fraction) * static_cast<double>(n) + 1e-9));
    const std::size_t n_train = n - n_valid;
    if (n_valid == 0) throw InvalidConfig("validation split is empty");
    if (n_train < dims + 2) throw InvalidConfig("training split is smaller than D + 2");
    if (n_train <= p_max) throw InvalidConfig("training split must exceed the component count");

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    CounterRng split_rng(CounterRng::derive(cfg.seed, "split"));
    shuffle(perm.begin(), perm.end(), split_rng);

    EmulatorModel base;
    base.specs = lut.design.specs;
    base.grid = lut.grid;
    base.config = cfg;
    base.train_rows.assign(perm.begin(), perm.begin() + static_cast<long>(n_train));
    base.valid_rows.assign(perm.begin() + static_cast<long>(n_train), perm.end());
    base.input_offset.resize(dims);
    base.input_scale.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        const auto& s = lut.design.specs[d];
        base.input_offset[d] = s.min;
        base.input_scale[d] = s.frozen() ? 1.0 : s.max - s.min;
    }

    const Matrix x_train = base.normalize_inputs(lut.design.points.select_rows(base.train_rows));
    const Matrix f_train = lut.spectra.select_rows(base.train_rows);
    const PcaModel pca = fit_pca(f_train, p_max);
    const Matrix scores = project(pca, f_train);
    const double pca_seconds = seconds_since(t0);

    std::vector<double> score_mean(p_max, 0.0);
    std::vector<double> score_std(p_max, 1.0);
    std::vector<std::vector<double>> targets(p_max, std::vector<double>(n_train));
    for (std::size_t c = 0; c < p_max; ++c) {
        double m = 0.0;
        for (std::size_t i = 0; i < n_train; ++i) m += scores(i, c);
        m /= static_cast<double>(n_train);
        double v = 0.0;
        for (std::size_t i = 0; i < n_train; ++i) v += (scores(i, c) - m) * (scores(i, c) - m);
        const double sd = std::sqrt(v / static_cast<double>(n_train - 1));
        score_mean[c] = m;
        score_std[c] = sd > 0.0 ? sd : 1.0;
        for (std::size_t i = 0; i < n_train; ++i) targets[c][i] = (scores(i, c) - m) / score_std[c];
    }

    std::vector<GprComponent> comps(p_max);
    std::vector<double> comp_seconds(p_max, 0.0);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < static_cast<long>(p_max); ++c) {
        const auto uc = static_cast<std::size_t>(c);
        try {
            const auto tc = std::chrono::steady_clock::now();
            comps[uc] = train_component(x_train, targets[uc], cfg, uc);
            comp_seconds[uc] = seconds_since(tc);
        } catch (...) {
#pragma omp critical(lutbench_train_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<EmulatorModel> models;
    for (const std::size_t p : ps) {
        EmulatorModel m = base;
        m.config.n_components = p;
        m.pca.mean = pca.mean;
        m.pca.basis = Matrix(pca.basis.rows(), p);
        for (std::size_t k = 0; k < pca.basis.rows(); ++k)
            for (std::size_t j = 0; j < p; ++j) m.pca.basis(k, j) = pca.basis(k, j);
        m.pca.explained.assign(pca.explained.begin(), pca.explained.begin() + static_cast<long>(p));
        m.components.assign(comps.begin(), comps.begin() + static_cast<long>(p));
        m.score_mean.assign(score_mean.begin(), score_mean.begin() + static_cast<long>(p));
        m.score_std.assign(score_std.begin(), score_std.begin() + static_cast<long>(p));
        m.train_seconds = pca_seconds;
        for (std::size_t c = 0; c < p; ++c) m.train_seconds += comp_seconds[c];
        m.validation = validation_summary(m, lut);
        models.push_back(std::move(m));
    }
    return models;
}

EmulatorModel train_emulator(const Lut& lut, const TrainConfig& cfg) {
    const std::size_t p[] = {cfg.n_components};
    return std::move(train_emulator_family(lut, cfg, p).front());
}

EvalReport validate_model(const EmulatorModel& model, const Lut& lut, const std::string& method,
                          NrmseNorm norm) {
    if (!(lut.grid == model.grid)) throw FormatError("LUT wavelength grid differs from the model's");
    if (lut.design.specs.size() != model.specs.size())
        throw FormatError("LUT variables differ from the model's");
    for (std::size_t d = 0; d < model.specs.size(); ++d)
        if (lut.design.specs[d].name != model.specs[d].name)
            throw FormatError("LUT variable " + lut.design.specs[d].name + " differs from the model's " +
                              model.specs[d].name);
    const auto pred = predict(model, lut.design.points);
    MethodOutput out{method, model.train_rows.size() + model.valid_rows.size(),
                     model.components.size(), pred.spectra, model.train_seconds, pred.seconds};
    return compare(lut.spectra, lut.grid.wavelengths(), out, norm);
}

}  // namespace lutbench
