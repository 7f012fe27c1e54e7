#include "gpprior/oracle.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

namespace gpprior::oracle {

Eigen::MatrixXd dense_sigma(const KernelSpec& spec, const HyperParams& theta,
                            const std::vector<double>& inputs, double jitter) {
  const auto n = static_cast<Eigen::Index>(inputs.size());
  const double sn = theta.noise_std();
  Eigen::MatrixXd sigma(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) sigma(i, j) = eval(spec, theta, inputs[i], inputs[j]);
  sigma.diagonal().array() += sn * sn + jitter;
  return sigma;
}

double dense_nlml(const KernelSpec& spec, const HyperParams& theta, const Dataset& data,
                  double jitter) {
  const Eigen::MatrixXd sigma = dense_sigma(spec, theta, data.inputs, jitter);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma);
  const Eigen::MatrixXd inv = lu.inverse();
  const Eigen::Map<const Eigen::VectorXd> y(data.outputs.data(),
                                            static_cast<Eigen::Index>(data.outputs.size()));
  const double n = static_cast<double>(y.size());
  return 0.5 * y.dot(inv * y) + 0.5 * std::log(lu.determinant()) +
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

Prediction dense_predict(const KernelSpec& spec, const HyperParams& theta, const Dataset& train,
                         const std::vector<double>& test_inputs, double jitter) {
  const Eigen::MatrixXd inv =
      Eigen::FullPivLU<Eigen::MatrixXd>(dense_sigma(spec, theta, train.inputs, jitter)).inverse();
  const auto n = static_cast<Eigen::Index>(train.inputs.size());
  const auto m = static_cast<Eigen::Index>(test_inputs.size());
  Eigen::MatrixXd k_star(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) k_star(i, j) = eval(spec, theta, train.inputs[i], test_inputs[j]);
  const Eigen::Map<const Eigen::VectorXd> y(train.outputs.data(), n);

  Prediction out;
  out.means = k_star.transpose() * inv * y;
  out.variances.resize(m);
  const Eigen::MatrixXd reduction = k_star.transpose() * inv * k_star;
  for (Eigen::Index j = 0; j < m; ++j)
    out.variances(j) = eval(spec, theta, test_inputs[j], test_inputs[j]) - reduction(j, j);
  return out;
}

Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

Eigen::VectorXd fd_nlml_gradient(const KernelSpec& spec, const HyperParams& theta,
                                 const Dataset& data, double jitter, double h) {
  return central_difference(
      [&](const Eigen::VectorXd& logs) {
        return dense_nlml(spec, HyperParams{logs, theta.layout}, data, jitter);
      },
      theta.log_values, h);
}

Eigen::MatrixXd fd_gram_grad(const KernelSpec& spec, const HyperParams& theta,
                             const std::vector<double>& inputs, std::size_t param_index, double h) {
  HyperParams plus = theta, minus = theta;
  plus.log_values(static_cast<Eigen::Index>(param_index)) += h;
  minus.log_values(static_cast<Eigen::Index>(param_index)) -= h;
  return (dense_sigma(spec, plus, inputs, 0.0) - dense_sigma(spec, minus, inputs, 0.0)) / (2.0 * h);
}

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

}  // namespace gpprior::oracle
