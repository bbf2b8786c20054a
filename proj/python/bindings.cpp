#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fhqr/error.hpp"
#include "fhqr/harness.hpp"
#include "fhqr/linalg.hpp"

namespace py = pybind11;
using namespace fhqr;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

IQMatrix to_matrix(const ComplexArray& a) {
  if (a.ndim() != 2) throw InvalidInput("expected a 2-D complex array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return IQMatrix(rows, cols, std::vector<cplx>(a.data(), a.data() + rows * cols));
}

ComplexArray to_array(const IQMatrix& m) {
  ComplexArray out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

SimConfig config_from(const std::string& text, bool full_scale) {
  std::istringstream in(text);
  return parse_config(in, full_scale ? table1_config() : desk_config());
}

py::dict sweep_to_dict(const SweepResult& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["snr_db"] = row.snr_db;
    d["compressor"] = to_string(row.compressor);
    d["l_u"] = row.l_u;
    d["trials"] = row.trials;
    d["tx_bits"] = row.tx_bits;
    d["bit_errors"] = row.bit_errors;
    d["user_tx_bits"] = row.user_tx_bits;
    d["user_bit_errors"] = row.user_bit_errors;
    d["ber"] = row.ber;
    d["ber_ci"] = py::make_tuple(row.ci.low, row.ci.high);
    d["cr"] = row.cr.cr;
    d["b_org"] = row.cr.b_org;
    d["b_cmp"] = row.cr.b_cmp;
    d["b_ovh"] = row.cr.b_ovh;
    d["median_compress_us"] = row.median_compress_us;
    rows.append(d);
  }
  py::dict out;
  out["rows"] = rows;
  out["channel_rank"] = r.channel_rank;
  out["warnings"] = r.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pivoted-QR fronthaul compression and uplink link-level simulation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<RankDeficient>(m, "RankDeficient", base.ptr());
  py::register_exception<DecodeError>(m, "DecodeError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InfeasibleBudget>(m, "InfeasibleBudget", base.ptr());
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());

  m.def(
      "pivoted_qr",
      [](const ComplexArray& a, std::size_t l, bool residual_pivoting, bool complete) {
        QrOptions opt{residual_pivoting ? PivotRule::kResidualNorm : PivotRule::kOriginalNorm,
                      complete ? DeficiencyPolicy::kComplete : DeficiencyPolicy::kThrow};
        const QrFactors f = pivoted_qr_approx(to_matrix(a), l, opt);
        return py::make_tuple(to_array(f.q), to_array(f.r), f.perm);
      },
      py::arg("a"), py::arg("l"), py::arg("residual_pivoting") = false, py::arg("complete") = false,
      "Truncated pivoted QR: returns (q, r, perm) with r's columns in perm order.");

  m.def(
      "qr_reconstruct",
      [](const ComplexArray& q, const ComplexArray& r, std::vector<std::size_t> perm) {
        QrFactors f;
        f.q = to_matrix(q);
        f.r = to_matrix(r);
        f.perm = std::move(perm);
        f.l_u = f.q.cols();
        return to_array(qr_reconstruct(f));
      },
      py::arg("q"), py::arg("r"), py::arg("perm"));

  m.def(
      "truncated_svd",
      [](const ComplexArray& a, std::size_t k) {
        const SvdFactors f = truncated_svd(to_matrix(a), k);
        return py::make_tuple(to_array(f.u), f.s, to_array(f.v));
      },
      py::arg("a"), py::arg("k"), "Top-k singular triplets: (u, s, v).");

  m.def(
      "compression_ratio",
      [](std::size_t n, std::size_t n_r, unsigned b_q, const std::vector<std::pair<std::size_t, std::size_t>>& users) {
        std::vector<UserShape> shapes;
        for (const auto& [n_f, l] : users) shapes.push_back(UserShape{n_f, l});
        const CrReport r = compression_ratio(n, n_r, b_q, shapes);
        py::dict d;
        d["b_org"] = r.b_org;
        d["b_cmp"] = r.b_cmp;
        d["b_ovh"] = r.b_ovh;
        d["cr"] = r.cr;
        return d;
      },
      py::arg("n"), py::arg("n_r"), py::arg("b_q"), py::arg("users"),
      "users is a list of (n_f, l_u) pairs; b_q is bits per complex sample.");

  m.def(
      "qam_modulate",
      [](const std::vector<std::uint8_t>& bits, int order) { return qam_modulate(bits, QamConfig(order)); },
      py::arg("bits"), py::arg("order") = 64);
  m.def(
      "qam_demodulate",
      [](const std::vector<cplx>& symbols, int order) { return qam_demodulate(symbols, QamConfig(order)); },
      py::arg("symbols"), py::arg("order") = 64);

  m.def(
      "compress_user",
      [](const ComplexArray& y, std::size_t l_u, unsigned bits, std::uint16_t user_id) {
        CompressedPayload p;
        const IQMatrix ym = to_matrix(y);
        p.header.n_samples = static_cast<std::uint32_t>(ym.rows());
        p.header.n_r = static_cast<std::uint32_t>(ym.cols());
        p.header.b_q = 2 * bits;
        p.header.n_users = 1;
        p.users.push_back(compress_user(ym, user_id, l_u, QuantizerSpec{bits}, nullptr));
        const auto bytes = serialize(p);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("y"), py::arg("l_u"), py::arg("bits_per_component") = 15, py::arg("user_id") = 0,
      "Compress one N_f x N_r user matrix into a single-user payload.");

  m.def(
      "decompress",
      [](const py::bytes& payload) {
        const std::string s = payload;
        const auto users = fhqr::decompress(
            deserialize(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())));
        py::dict out;
        for (const auto& u : users) out[py::int_(u.user_id)] = to_array(u.y);
        return out;
      },
      py::arg("payload"), "Decode a QR payload into {user_id: matrix}.");

  m.def(
      "run_sweep",
      [](const std::string& config_text, bool full_scale, std::size_t workers) {
        const SimConfig cfg = config_from(config_text, full_scale);
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = fhqr::run_sweep(cfg, workers);
        }
        return sweep_to_dict(r);
      },
      py::arg("config_text"), py::arg("full_scale") = false, py::arg("workers") = 1,
      "Run a BER sweep from `key = value` config text.");

  m.def(
      "sweep_csv",
      [](const std::string& config_text, bool full_scale) {
        const SimConfig cfg = config_from(config_text, full_scale);
        std::ostringstream out;
        {
          py::gil_scoped_release release;
          write_csv(fhqr::run_sweep(cfg, 1), out);
        }
        return out.str();
      },
      py::arg("config_text"), py::arg("full_scale") = false);
}
