#include "blindcen/filters.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace blindcen {

namespace {

using json = nlohmann::json;

double poly_gain(const PolynomialFilter& f, double lambda) {
  if (f.coefficients.empty())
    throw std::invalid_argument("polynomial filter needs at least one coefficient");
  double acc = 0.0;
  for (auto it = f.coefficients.rbegin(); it != f.coefficients.rend(); ++it)
    acc = acc * lambda + *it;
  return acc;
}

double iir_gain(const IirFilter& f, double lambda) {
  if (!(f.alpha > 0.0))
    throw std::invalid_argument("IIR filter requires alpha > 0");
  // (I - alpha A)^{-1} exists for any spectrum avoiding the pole at
  // lambda = 1/alpha; gains past the pole are negative but well defined.
  const double d = 1.0 - f.alpha * lambda;
  if (std::abs(d) <= 1e-12)
    throw std::domain_error(
        "IIR pole condition violated: alpha*lambda is 1 to tolerance");
  return 1.0 / d;
}

Eigen::VectorXd gains_on_spectrum(const FilterSpec& f,
                                  const SpectralDecomposition& sd) {
  Eigen::VectorXd g(sd.n());
  for (int j = 0; j < sd.n(); ++j) g[j] = filter_gain(f, sd.eigenvalues[j]);
  return g;
}

json to_json_impl(const FilterSpec& f) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PolynomialFilter>) {
          return json{{"kind", "poly"}, {"coefficients", v.coefficients}};
        } else if constexpr (std::is_same_v<T, IirFilter>) {
          return json{{"kind", "iir"}, {"alpha", v.alpha}};
        } else {
          json inner = std::visit(
              [](const auto& w) { return to_json_impl(FilterSpec{w}); },
              v.inner);
          return json{{"kind", "boosted"}, {"inner", inner}, {"rho", v.rho}};
        }
      },
      f);
}

FilterSpec from_json_impl(const json& j, bool allow_boosted) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument("filter JSON must be an object with a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "poly") {
    PolynomialFilter f;
    f.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (f.coefficients.empty())
      throw std::invalid_argument("filter JSON: empty coefficient list");
    return f;
  }
  if (kind == "iir") {
    IirFilter f;
    f.alpha = j.at("alpha").get<double>();
    if (!(f.alpha > 0.0))
      throw std::invalid_argument("filter JSON: iir alpha must be > 0");
    return f;
  }
  if (kind == "boosted") {
    if (!allow_boosted)
      throw std::invalid_argument("filter JSON: boosted filter cannot nest");
    BoostedFilter f;
    FilterSpec inner = from_json_impl(j.at("inner"), false);
    std::visit(
        [&f](auto&& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (!std::is_same_v<T, BoostedFilter>) f.inner = v;
        },
        inner);
    f.rho = j.at("rho").get<double>();
    if (!std::isfinite(f.rho))
      throw std::invalid_argument("filter JSON: rho must be finite");
    return f;
  }
  throw std::invalid_argument("filter JSON: unknown kind \"" + kind + "\"");
}

}  // namespace

double filter_gain(const FilterSpec& f, double lambda) {
  return std::visit(
      [lambda](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PolynomialFilter>) {
          return poly_gain(v, lambda);
        } else if constexpr (std::is_same_v<T, IirFilter>) {
          return iir_gain(v, lambda);
        } else {
          const double base =
              std::visit([lambda](const auto& w) -> double {
                using U = std::decay_t<decltype(w)>;
                if constexpr (std::is_same_v<U, PolynomialFilter>)
                  return poly_gain(w, lambda);
                else
                  return iir_gain(w, lambda);
              }, v.inner);
          return base - v.rho;
        }
      },
      f);
}

Eigen::MatrixXd apply_filter(const FilterSpec& f,
                             const SpectralDecomposition& sd,
                             const Eigen::MatrixXd& x) {
  if (x.rows() != sd.n())
    throw std::invalid_argument("apply_filter: X row count does not match the spectrum");
  const Eigen::VectorXd g = gains_on_spectrum(f, sd);
  return sd.eigenvectors * (g.asDiagonal() * (sd.eigenvectors.transpose() * x));
}

double lowpass_ratio(const FilterSpec& f, const SpectralDecomposition& sd) {
  if (sd.n() < 2)
    throw std::invalid_argument("lowpass_ratio needs at least two eigenvalues");
  const Eigen::VectorXd g = gains_on_spectrum(f, sd);
  const double denom = std::abs(g[0]);
  if (denom < 1e-14)
    throw std::domain_error("lowpass_ratio: |h(lambda_1)| is numerically zero");
  return g.tail(g.size() - 1).cwiseAbs().maxCoeff() / denom;
}

FilterSpec boost(const FilterSpec& f, double rho) {
  if (!std::isfinite(rho))
    throw std::invalid_argument("boost: rho must be finite");
  if (std::holds_alternative<BoostedFilter>(f))
    throw std::invalid_argument("boost: filter is already boosted");
  BoostedFilter b;
  b.rho = rho;
  if (const auto* p = std::get_if<PolynomialFilter>(&f))
    b.inner = *p;
  else
    b.inner = std::get<IirFilter>(f);
  return b;
}

double compute_c_boost(const FilterSpec& f, double rho,
                       const SpectralDecomposition& sd) {
  const double base = lowpass_ratio(f, sd);
  if (!(base > 0.0))
    throw std::domain_error("compute_c_boost: lowpass_ratio(f) must be positive");
  return lowpass_ratio(boost(f, rho), sd) / base;
}

DiagnosticsBundle alignment_error_bound(const FilterSpec& f,
                               const SpectralDecomposition& sd,
                               const Eigen::MatrixXd& b, double rho) {
  if (std::holds_alternative<BoostedFilter>(f))
    throw std::invalid_argument("alignment_error_bound expects the unboosted filter");
  if (b.rows() != sd.n())
    throw std::invalid_argument("alignment_error_bound: B row count does not match the spectrum");

  const Eigen::VectorXd g = gains_on_spectrum(f, sd);
  const double h1 = g[0];
  const double max_rest_signed = g.tail(g.size() - 1).maxCoeff();
  if (!(h1 > max_rest_signed))
    throw std::domain_error(
        "alignment_error_bound: condition (ii) violated: h(lambda_1) does not strictly "
        "dominate the remaining gains");
  if (std::abs(h1) < 1e-14)
    throw std::domain_error("alignment_error_bound: |h(lambda_1)| is numerically zero");

  const Eigen::MatrixXd hb = apply_filter(f, sd, b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(hb, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd q1 = svd.matrixV().col(0);

  const Eigen::VectorXd v1 = sd.eigenvectors.col(0);
  double align = v1.dot(b * q1);
  if (std::abs(align) <= 1e-12)
    throw std::domain_error(
        "alignment_error_bound: condition (i) violated: v1^T B q1 is zero to tolerance");
  if (align < 0) {
    q1 = -q1;
    align = -align;
  }

  DiagnosticsBundle out;
  out.lowpass_ratio = g.tail(g.size() - 1).cwiseAbs().maxCoeff() / std::abs(h1);
  const Eigen::MatrixXd v_rest =
      sd.eigenvectors.rightCols(sd.n() - 1);
  const double rest_mass = (v_rest.transpose() * (b * q1)).norm();
  out.gamma_bound = std::sqrt(2.0) * out.lowpass_ratio * rest_mass / align;
  out.c_boost = compute_c_boost(f, rho, sd);
  out.boosted_bound = out.c_boost * out.gamma_bound;
  out.q1 = std::move(q1);
  out.signed_gain_margin = h1 - max_rest_signed;
  // Signed condition holds here; the absolute form additionally requires
  // |h(lambda_1)| to dominate, which fails iff the ratio reaches 1.
  out.abs_form_differs = out.lowpass_ratio >= 1.0;
  return out;
}

std::string filter_to_json(const FilterSpec& f) { return to_json_impl(f).dump(); }

FilterSpec filter_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("filter JSON parse error: ") + e.what());
  }
  return from_json_impl(j, true);
}

}  // namespace blindcen
