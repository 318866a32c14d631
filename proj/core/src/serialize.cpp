#include "dpr/serialize.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace dpr {

namespace {

constexpr std::uint32_t kNetMagic = 0x4450524E;       // "DPRN"
constexpr std::uint32_t kEnsembleMagic = 0x44505241;  // "DPRA"

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw SerializeError("truncated header");
  return v;
}

void write_matrix_rowmajor(std::ostream& out, const Eigen::MatrixXd& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

Eigen::MatrixXd read_matrix_rowmajor(std::istream& in, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) throw SerializeError("truncated weight block");
      m(r, c) = v;
    }
  return m;
}

}  // namespace

void save_net(const GeneratorNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SerializeError("cannot open " + path + " for writing");
  write_u32(out, kNetMagic);
  write_u32(out, static_cast<std::uint32_t>(net.dims.k));
  write_u32(out, static_cast<std::uint32_t>(net.depth()));
  for (int n : net.dims.layer_dims) write_u32(out, static_cast<std::uint32_t>(n));
  for (const auto& w : net.weights) write_matrix_rowmajor(out, w);
}

GeneratorNet load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SerializeError("cannot open " + path);
  if (read_u32(in) != kNetMagic) throw SerializeError("not a net file: " + path);
  GeneratorNet net;
  net.dims.k = static_cast<int>(read_u32(in));
  const int depth = static_cast<int>(read_u32(in));
  net.dims.layer_dims.resize(depth);
  for (int i = 0; i < depth; ++i) net.dims.layer_dims[i] = static_cast<int>(read_u32(in));
  if (!net.dims.valid()) throw SerializeError("invalid dims header in " + path);
  int prev = net.dims.k;
  for (int i = 0; i < depth; ++i) {
    net.weights.push_back(read_matrix_rowmajor(in, net.dims.layer_dims[i], prev));
    prev = net.dims.layer_dims[i];
  }
  return net;
}

void save_ensemble(const MeasurementEnsemble& ensemble, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SerializeError("cannot open " + path + " for writing");
  write_u32(out, kEnsembleMagic);
  write_u32(out, static_cast<std::uint32_t>(ensemble.m()));
  write_u32(out, static_cast<std::uint32_t>(ensemble.n()));
  write_matrix_rowmajor(out, ensemble.a);
}

MeasurementEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SerializeError("cannot open " + path);
  if (read_u32(in) != kEnsembleMagic) throw SerializeError("not an ensemble file: " + path);
  const int m = static_cast<int>(read_u32(in));
  const int n = static_cast<int>(read_u32(in));
  if (m < 1 || n < 1) throw SerializeError("invalid ensemble header in " + path);
  return MeasurementEnsemble{read_matrix_rowmajor(in, m, n)};
}

std::string observation_to_csv(const PhaselessObservation& obs) {
  std::ostringstream out;
  out.precision(17);
  out << "b_i\n";
  for (int i = 0; i < obs.b.size(); ++i) out << obs.b[i] << "\n";
  return out.str();
}

}  // namespace dpr
