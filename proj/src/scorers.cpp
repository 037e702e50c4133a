#include "ngsp/scorers.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "ngsp/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts are unsupported");

namespace ngsp {

std::vector<double> log_expand(std::span<const double> x) {
    std::vector<double> out;
    out.reserve(x.size() * 2);
    for (double v : x) out.push_back(v);
    for (double v : x) out.push_back(std::log(std::max(v, 0.0) + 1e-6));
    return out;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double dot_product(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

void Standardizer::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DataError("cannot fit standardizer on empty training set");
    const std::size_t d = rows.front().size();
    mean.assign(d, 0.0);
    scale.assign(d, 1.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
    for (double& m : mean) m /= static_cast<double>(rows.size());
    std::vector<double> var(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) {
            double c = r[j] - mean[j];
            var[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        double sd = std::sqrt(var[j] / static_cast<double>(rows.size()));
        scale[j] = sd > 1e-12 ? sd : 1.0;
    }
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
}

double LogisticModel::predict(std::span<const double> x) const {
    if (constant || weights.empty()) return 0.5;
    auto z = standardizer.apply(log_expand(x));
    return sigmoid(dot_product(z, weights) + bias);
}

void LogisticModel::train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                          const TrainHyper& hyper) {
    if (x.empty() || x.size() != y.size()) throw DataError("bad logistic training set");
    std::vector<std::vector<double>> expanded;
    expanded.reserve(x.size());
    for (const auto& r : x) expanded.push_back(log_expand(r));
    const std::size_t d = expanded.front().size();
    standardizer.fit(expanded);
    std::vector<std::vector<double>> z;
    z.reserve(expanded.size());
    for (const auto& r : expanded) z.push_back(standardizer.apply(r));

    long long pos = 0;
    for (int v : y) pos += v;
    const long long neg = static_cast<long long>(y.size()) - pos;
    // Balanced class weights so 0.5 stays a meaningful decision threshold.
    const double wp = pos > 0 ? 0.5 / static_cast<double>(pos) : 0.0;
    const double wn = neg > 0 ? 0.5 / static_cast<double>(neg) : 0.0;

    weights.assign(d, 0.0);
    bias = 0.0;
    constant = false;
    std::vector<double> grad(d);
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double p = sigmoid(dot_product(z[i], weights) + bias);
            double err = (p - static_cast<double>(y[i])) * (y[i] ? wp : wn);
            for (std::size_t j = 0; j < d; ++j) grad[j] += err * z[i][j];
            gb += err;
        }
        for (std::size_t j = 0; j < d; ++j)
            weights[j] -= hyper.learning_rate * (grad[j] + hyper.l2 * weights[j]);
        bias -= hyper.learning_rate * gb;
    }
}

std::vector<double> MultinomialModel::predict_proba(std::span<const double> x) const {
    if (classes <= 0) throw DataError("multinomial model is untrained");
    std::vector<double> logits(static_cast<std::size_t>(classes), 0.0);
    if (!weights.empty()) {
        auto z = standardizer.apply(log_expand(x));
        for (int c = 0; c < classes; ++c)
            logits[static_cast<std::size_t>(c)] =
                dot_product(z, std::span<const double>(weights).subspan(
                                   static_cast<std::size_t>(c) * static_cast<std::size_t>(dim),
                                   static_cast<std::size_t>(dim))) +
                bias[static_cast<std::size_t>(c)];
    }
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logits) v /= sum;
    return logits;
}

void MultinomialModel::train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                             int n_classes, const TrainHyper& hyper) {
    if (x.empty() || x.size() != y.size()) throw DataError("bad multinomial training set");
    std::vector<std::vector<double>> expanded;
    expanded.reserve(x.size());
    for (const auto& r : x) expanded.push_back(log_expand(r));
    classes = n_classes;
    dim = static_cast<int>(expanded.front().size());
    standardizer.fit(expanded);
    std::vector<std::vector<double>> z;
    z.reserve(expanded.size());
    for (const auto& r : expanded) z.push_back(standardizer.apply(r));

    // Class-balanced weighting so rare classes are not systematically
    // under-scored.
    std::vector<double> class_weight(static_cast<std::size_t>(classes), 0.0);
    for (int label : y) class_weight[static_cast<std::size_t>(label)] += 1.0;
    for (double& w : class_weight)
        w = w > 0 ? 1.0 / (w * static_cast<double>(classes)) : 0.0;

    weights.assign(static_cast<std::size_t>(classes) * static_cast<std::size_t>(dim), 0.0);
    bias.assign(static_cast<std::size_t>(classes), 0.0);
    std::vector<double> grad_w(weights.size());
    std::vector<double> grad_b(bias.size());
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        for (std::size_t i = 0; i < z.size(); ++i) {
            auto p = predict_proba_standardized(z[i]);
            const double sample_weight = class_weight[static_cast<std::size_t>(y[i])];
            for (int c = 0; c < classes; ++c) {
                double err =
                    (p[static_cast<std::size_t>(c)] - (y[i] == c ? 1.0 : 0.0)) * sample_weight;
                grad_b[static_cast<std::size_t>(c)] += err;
                double* gw = grad_w.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(dim);
                for (int j = 0; j < dim; ++j) gw[j] += err * z[i][static_cast<std::size_t>(j)];
            }
        }
        for (std::size_t j = 0; j < weights.size(); ++j)
            weights[j] -= hyper.learning_rate * (grad_w[j] + hyper.l2 * weights[j]);
        for (std::size_t c = 0; c < bias.size(); ++c)
            bias[c] -= hyper.learning_rate * grad_b[c];
    }
}

std::vector<double> MultinomialModel::predict_proba_standardized(
    std::span<const double> z) const {
    std::vector<double> logits(static_cast<std::size_t>(classes), 0.0);
    for (int c = 0; c < classes; ++c)
        logits[static_cast<std::size_t>(c)] =
            dot_product(z, std::span<const double>(weights).subspan(
                               static_cast<std::size_t>(c) * static_cast<std::size_t>(dim),
                               static_cast<std::size_t>(dim))) +
            bias[static_cast<std::size_t>(c)];
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logits) v /= sum;
    return logits;
}

double BoundedLinearModel::predict(std::span<const double> x) const {
    if (constant || weights.empty()) return 0.5;
    auto z = standardizer.apply(log_expand(x));
    return sigmoid(dot_product(z, weights) + bias);
}

void BoundedLinearModel::train(const std::vector<std::vector<double>>& x,
                               const std::vector<double>& targets, const TrainHyper& hyper) {
    if (x.empty() || x.size() != targets.size()) throw DataError("bad area training set");
    std::vector<std::vector<double>> expanded;
    expanded.reserve(x.size());
    for (const auto& r : x) expanded.push_back(log_expand(r));
    const std::size_t d = expanded.front().size();
    standardizer.fit(expanded);
    std::vector<std::vector<double>> z;
    z.reserve(expanded.size());
    for (const auto& r : expanded) z.push_back(standardizer.apply(r));

    weights.assign(d, 0.0);
    bias = 0.0;
    constant = false;
    const double inv_n = 1.0 / static_cast<double>(z.size());
    std::vector<double> grad(d);
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double p = sigmoid(dot_product(z[i], weights) + bias);
            // d/dz of squared error through the sigmoid
            double err = 2.0 * (p - targets[i]) * p * (1.0 - p) * inv_n;
            for (std::size_t j = 0; j < d; ++j) grad[j] += err * z[i][j];
            gb += err;
        }
        for (std::size_t j = 0; j < d; ++j)
            weights[j] -= hyper.learning_rate * (grad[j] + hyper.l2 * weights[j]);
        bias -= hyper.learning_rate * gb;
    }
}

void write_f64(std::ostream& out, double v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.write(buf, 8);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.write(buf, 4);
}

void write_f64_vec(std::ostream& out, const std::vector<double>& v) {
    write_u32(out, static_cast<std::uint32_t>(v.size()));
    for (double x : v) write_f64(out, x);
}

double read_f64(std::istream& in) {
    char buf[8];
    in.read(buf, 8);
    if (!in) throw DataError("truncated model file");
    double v;
    std::memcpy(&v, buf, 8);
    return v;
}

std::uint32_t read_u32(std::istream& in) {
    char buf[4];
    in.read(buf, 4);
    if (!in) throw DataError("truncated model file");
    std::uint32_t v;
    std::memcpy(&v, buf, 4);
    return v;
}

std::vector<double> read_f64_vec(std::istream& in) {
    std::uint32_t n = read_u32(in);
    std::vector<double> v(n);
    for (auto& x : v) x = read_f64(in);
    return v;
}

void write_standardizer(std::ostream& out, const Standardizer& s) {
    write_f64_vec(out, s.mean);
    write_f64_vec(out, s.scale);
}

Standardizer read_standardizer(std::istream& in) {
    Standardizer s;
    s.mean = read_f64_vec(in);
    s.scale = read_f64_vec(in);
    return s;
}

void write_logistic(std::ostream& out, const LogisticModel& m) {
    write_u32(out, m.constant ? 1u : 0u);
    write_standardizer(out, m.standardizer);
    write_f64_vec(out, m.weights);
    write_f64(out, m.bias);
}

LogisticModel read_logistic(std::istream& in) {
    LogisticModel m;
    m.constant = read_u32(in) != 0;
    m.standardizer = read_standardizer(in);
    m.weights = read_f64_vec(in);
    m.bias = read_f64(in);
    return m;
}

void write_multinomial(std::ostream& out, const MultinomialModel& m) {
    write_u32(out, static_cast<std::uint32_t>(m.classes));
    write_u32(out, static_cast<std::uint32_t>(m.dim));
    write_standardizer(out, m.standardizer);
    write_f64_vec(out, m.weights);
    write_f64_vec(out, m.bias);
}

MultinomialModel read_multinomial(std::istream& in) {
    MultinomialModel m;
    m.classes = static_cast<int>(read_u32(in));
    m.dim = static_cast<int>(read_u32(in));
    m.standardizer = read_standardizer(in);
    m.weights = read_f64_vec(in);
    m.bias = read_f64_vec(in);
    return m;
}

void write_bounded_linear(std::ostream& out, const BoundedLinearModel& m) {
    write_u32(out, m.constant ? 1u : 0u);
    write_standardizer(out, m.standardizer);
    write_f64_vec(out, m.weights);
    write_f64(out, m.bias);
}

BoundedLinearModel read_bounded_linear(std::istream& in) {
    BoundedLinearModel m;
    m.constant = read_u32(in) != 0;
    m.standardizer = read_standardizer(in);
    m.weights = read_f64_vec(in);
    m.bias = read_f64(in);
    return m;
}

} // namespace ngsp
