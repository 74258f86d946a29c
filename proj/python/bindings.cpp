#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>

#include "mfxwt/box_counting.hpp"
#include "mfxwt/engine.hpp"
#include "mfxwt/error.hpp"
#include "mfxwt/io.hpp"
#include "mfxwt/surrogates.hpp"
#include "mfxwt/synth.hpp"
#include "mfxwt/theory.hpp"
#include "mfxwt/wavelet.hpp"

namespace py = pybind11;
using namespace mfxwt;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

ScaleGrid grid_or_default(std::optional<std::vector<double>> scales, std::size_t n) {
  return scales ? ScaleGrid(std::move(*scales)) : ScaleGrid::default_for(n);
}

OrderGrid orders_from(double p_max, double p_step, double q_max, double q_step) {
  return OrderGrid::uniform(p_max, p_step, q_max, q_step);
}

std::optional<ScalingRange> range_from(std::optional<std::pair<double, double>> r) {
  if (!r) return std::nullopt;
  return ScalingRange{r->first, r->second};
}

}  // namespace

PYBIND11_MODULE(_mfxwt, m) {
  m.doc() = "Joint multifractal analysis of paired series with wavelet partition functions.";

  py::register_exception<Error>(m, "MfxwtError", PyExc_RuntimeError);

  m.def(
      "cwt",
      [](const Array& x, std::optional<std::vector<double>> scales, int order, double half_width) {
        const auto s = view(x);
        const auto field = cwt(s, grid_or_default(std::move(scales), s.size()), KernelSpec{order, half_width});
        py::array_t<double> out({static_cast<py::ssize_t>(field.scale_count()), static_cast<py::ssize_t>(s.size())});
        for (std::size_t j = 0; j < field.scale_count(); ++j)
          std::copy(field.row(j).begin(), field.row(j).end(), out.mutable_data() + j * s.size());
        return out;
      },
      py::arg("x"), py::arg("scales") = py::none(), py::arg("order") = 2, py::arg("half_width") = 8.0,
      "Wavelet coefficients, one row per scale. Default scales: 30 log-spaced in [4, n/8].");

  m.def("default_scales", [](std::size_t n) { return to_array(ScaleGrid::default_for(n).scales()); },
        py::arg("n"));

  m.def(
      "analyze",
      [](const Array& x, const Array& y, std::optional<std::vector<double>> scales, double p_max, double p_step,
         double q_max, double q_step, std::optional<std::pair<double, double>> range) {
        const auto sx = view(x), sy = view(y);
        const auto grid = grid_or_default(std::move(scales), sx.size());
        const auto [wx, wy] = cwt_pair(sx, sy, grid);
        const auto orders = orders_from(p_max, p_step, q_max, q_step);
        const auto table = joint_partition(wx, wy, orders);
        const auto surf = fit_mass_exponents(table, range_from(range));
        const auto spec = legendre_spectrum(surf);
        const auto plane = fit_plane(surf);
        py::dict d;
        d["p_values"] = to_array(orders.p_values());
        d["q_values"] = to_array(orders.q_values());
        d["scales"] = to_array(grid.scales());
        d["T"] = to_array(surf.T);
        d["r2"] = to_array(surf.r2);
        d["h_x"] = to_array(spec.h_x);
        d["h_y"] = to_array(spec.h_y);
        d["D"] = to_array(spec.D);
        d["plane"] = py::make_tuple(plane.a, plane.b, plane.c, plane.r2);
        d["warnings"] = table.warnings;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("scales") = py::none(), py::arg("p_max") = 10.0, py::arg("p_step") = 0.5,
      py::arg("q_max") = 10.0, py::arg("q_step") = 0.5, py::arg("range") = py::none(),
      "Joint mass exponents T(p, q) with r^2 and the Legendre spectrum.");

  m.def(
      "diagonal",
      [](const Array& x, const Array& y, std::optional<std::vector<double>> scales,
         std::optional<std::vector<double>> q_values, std::optional<std::pair<double, double>> range) {
        const auto sx = view(x), sy = view(y);
        const auto grid = grid_or_default(std::move(scales), sx.size());
        const auto [wx, wy] = cwt_pair(sx, sy, grid);
        const auto q = q_values ? *q_values : default_diagonal_orders();
        const auto s = diagonal_analysis(wx, wy, q, range_from(range));
        py::dict d;
        d["q_values"] = to_array(s.q_values);
        d["T"] = to_array(s.T);
        d["h"] = to_array(s.h);
        d["D"] = to_array(s.D);
        d["h_legendre"] = to_array(s.h_legendre);
        d["D_legendre"] = to_array(s.D_legendre);
        d["width"] = s.width;
        d["width_legendre"] = s.width_legendre;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("scales") = py::none(), py::arg("q_values") = py::none(),
      py::arg("range") = py::none(), "The p = q slice: h_xy(q), D(q) by both routes and the width of h_xy.");

  m.def(
      "compare_wt_pf",
      [](const Array& x, const Array& y, double p_max, double p_step, double q_max, double q_step) {
        const auto px = dyadic_prefix(view(x)), py_ = dyadic_prefix(view(y));
        const auto orders = orders_from(p_max, p_step, q_max, q_step);
        const auto sizes = dyadic_sizes(4, std::bit_floor(px.size() / 8));
        const auto pf = joint_partition_pf(box_measures(px, sizes), box_measures(py_, sizes), orders);
        const auto [wx, wy] = cwt_pair(px, py_, ScaleGrid::default_for(px.size()));
        const auto c = compare_wt_pf(scaled_partition_for_comparison(joint_partition(wx, wy, orders)), pf);
        py::dict d;
        d["wt_slope"] = to_array(c.wt_slope);
        d["pf_slope"] = to_array(c.pf_slope);
        d["max_abs"] = c.max_abs;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("p_max") = 10.0, py::arg("p_step") = 2.0, py::arg("q_max") = 10.0,
      py::arg("q_step") = 2.0, "Slopes of the wavelet and box-counting partition functions on common scales.");

  py::class_<BinomialTheory>(m, "BinomialTheory")
      .def(py::init<double, double>(), py::arg("p_x"), py::arg("p_y"))
      .def_property_readonly("beta", &BinomialTheory::beta)
      .def_property_readonly("gamma", &BinomialTheory::gamma)
      .def("tau", &BinomialTheory::tau, py::arg("p"), py::arg("q"))
      .def(
          "alphas",
          [](const BinomialTheory& t, double p, double q) {
            const auto a = t.alphas(p, q);
            return py::make_tuple(a.alpha_x, a.alpha_y);
          },
          py::arg("p"), py::arg("q"))
      .def("f", &BinomialTheory::f, py::arg("p"), py::arg("q"))
      .def(
          "wavelet_T",
          [](const BinomialTheory& t, double p, double q) {
            const auto a = t.alphas(p, q);
            return map_pf_to_wt(t.tau(p, q), a.alpha_x, a.alpha_y, t.f(p, q), p, q).T;
          },
          py::arg("p"), py::arg("q"));

  m.def("binomial_scaling_exponent", &binomial_scaling_exponent, py::arg("q"), py::arg("p_z"));
  m.def("binomial_mass_exponent", &binomial_mass_exponent, py::arg("q"), py::arg("p_z"));

  m.def("gen_binomial", [](double p_z, int k) { return to_array(gen_binomial({p_z, k})); }, py::arg("p_z"),
        py::arg("k"));

  m.def(
      "gen_bfbm",
      [](double H_x, double H_y, double rho, std::size_t n, std::uint64_t seed, double sigma_x, double sigma_y,
         bool increments) {
        const auto s = gen_bfbm({H_x, H_y, rho, n, sigma_x, sigma_y, seed});
        return increments ? py::make_tuple(to_array(s.dx), to_array(s.dy)) : py::make_tuple(to_array(s.x), to_array(s.y));
      },
      py::arg("H_x"), py::arg("H_y"), py::arg("rho"), py::arg("n"), py::arg("seed"), py::arg("sigma_x") = 1.0,
      py::arg("sigma_y") = 1.0, py::arg("increments") = false, "One bivariate fBm realisation (paths by default).");

  m.def("pearson", [](const Array& x, const Array& y) { return pearson(view(x), view(y)); }, py::arg("x"),
        py::arg("y"));

  m.def(
      "make_surrogate",
      [](const Array& x, const Array& y, const std::string& kind, std::size_t n_shift, std::uint64_t seed) {
        const auto [a, b] = make_surrogate(view(x), view(y), parse_surrogate_kind(kind), n_shift, seed);
        return py::make_tuple(to_array(a), to_array(b));
      },
      py::arg("x"), py::arg("y"), py::arg("kind"), py::arg("n_shift") = 0, py::arg("seed") = 0);

  m.def(
      "surrogate_ensemble",
      [](const Array& x, const Array& y, const std::string& kind, std::size_t count, std::uint64_t seed) {
        const auto sx = view(x), sy = view(y);
        const auto k = parse_surrogate_kind(kind);
        SurrogateReport r;
        {
          py::gil_scoped_release release;
          r = surrogate_ensemble(sx, sy, k, count, seed, EngineConfig{});
        }
        py::dict d;
        d["kind"] = to_string(r.kind);
        d["count"] = r.count;
        d["observed"] = r.observed;
        d["mean"] = r.mean;
        d["std"] = r.std;
        d["std_error"] = r.std_error;
        d["p_value"] = r.p_value;
        d["widths"] = to_array(r.widths);
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("kind"), py::arg("count"), py::arg("seed"));

  m.def(
      "load_price_csv",
      [](const std::string& path, const std::string& date_col, const std::string& close_col) {
        const auto p = load_price_csv(path, ColumnMapping{date_col, close_col});
        std::vector<std::string> dates;
        for (const auto& d : p.dates) dates.push_back(format_date(d));
        return py::make_tuple(dates, to_array(p.closes));
      },
      py::arg("path"), py::arg("date_col") = "Date", py::arg("close_col") = "Close",
      "(dates as YYYY-MM-DD strings, closes), sorted by date.");
}
