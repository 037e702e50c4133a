#ifndef NGSP_SCORERS_HPP
#define NGSP_SCORERS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace ngsp {

struct TrainHyper {
    double learning_rate = 5e-2;
    int epochs = 2000;
    double l2 = 1e-4;
};

// Internal basis expansion applied by every model before standardization:
// appends log(max(x, 0) + 1e-6) per input so scale-type features (extents,
// eigenvalues, areas, counts) become linearly separable across decades.
// Negative-valued inputs contribute a near-constant column that standardizes
// away.
std::vector<double> log_expand(std::span<const double> x);

// Per-feature affine standardization fitted on the training matrix and stored
// with each model.
struct Standardizer {
    std::vector<double> mean, scale;

    void fit(const std::vector<std::vector<double>>& rows);
    std::vector<double> apply(std::span<const double> x) const;
};

// Binary logistic regression trained by full-batch gradient descent with
// class-balanced cross entropy.
struct LogisticModel {
    Standardizer standardizer;
    std::vector<double> weights;
    double bias = 0.0;
    bool constant = false; // untrained fallback; predicts 0.5

    double predict(std::span<const double> x) const;
    void train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
               const TrainHyper& hyper);
};

// Multinomial logistic regression (softmax), full-batch gradient descent.
struct MultinomialModel {
    Standardizer standardizer;
    int classes = 0;
    int dim = 0;
    std::vector<double> weights; // classes x dim, row-major
    std::vector<double> bias;    // classes

    std::vector<double> predict_proba(std::span<const double> x) const;
    std::vector<double> predict_proba_standardized(std::span<const double> z) const;
    void train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
               int classes, const TrainHyper& hyper);
};

// Sigmoid-bounded linear model trained with mean squared error; used for the
// region-group area head (targets in [0,1]).
struct BoundedLinearModel {
    Standardizer standardizer;
    std::vector<double> weights;
    double bias = 0.0;
    bool constant = false;

    double predict(std::span<const double> x) const;
    void train(const std::vector<std::vector<double>>& x, const std::vector<double>& targets,
               const TrainHyper& hyper);
};

// Little-endian binary serialization primitives shared by the model file.
void write_f64(std::ostream& out, double v);
void write_u32(std::ostream& out, std::uint32_t v);
void write_f64_vec(std::ostream& out, const std::vector<double>& v);
double read_f64(std::istream& in);
std::uint32_t read_u32(std::istream& in);
std::vector<double> read_f64_vec(std::istream& in);

void write_standardizer(std::ostream& out, const Standardizer& s);
Standardizer read_standardizer(std::istream& in);
void write_logistic(std::ostream& out, const LogisticModel& m);
LogisticModel read_logistic(std::istream& in);
void write_multinomial(std::ostream& out, const MultinomialModel& m);
MultinomialModel read_multinomial(std::istream& in);
void write_bounded_linear(std::ostream& out, const BoundedLinearModel& m);
BoundedLinearModel read_bounded_linear(std::istream& in);

} // namespace ngsp

#endif
