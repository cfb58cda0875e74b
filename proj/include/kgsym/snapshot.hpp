#pragma once

// Spectral state snapshots.
//
// binary: "KGSNAP01", int64 N, double time, then u and v as 2N (re, im) pairs
//         each in mode order -N..N-1; host byte order.
// csv:    "# time=<t> N=<n>", header "mode,u_re,u_im,v_re,v_im", one row per mode.

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kgsym/errors.hpp"
#include "kgsym/grid.hpp"

namespace kgsym {

struct Snapshot {
  double time = 0.0;
  StateU state;
};

inline constexpr std::array<char, 8> kSnapshotMagic{'K', 'G', 'S', 'N', 'A', 'P', '0', '1'};

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("cannot parse number '" + std::string(s) + "'");
  }
  return x;
}

inline void write_snapshot_binary(const std::string& path, double time, const StateU& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
  const std::int64_t n = w.grid().half_points();
  out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&time), sizeof time);
  for (const auto* f : {&w.u, &w.v}) {
    const auto c = f->coeffs();
    out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(Complex)));
  }
  if (!out) throw std::runtime_error("short write to snapshot '" + path + "'");
}

inline Snapshot read_snapshot_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  std::array<char, 8> magic{};
  std::int64_t n = 0;
  double time = 0.0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&time), sizeof time);
  if (!in || magic != kSnapshotMagic) throw std::runtime_error("'" + path + "' is not a snapshot file");
  if (n < 4 || n > (std::int64_t{1} << 28)) throw DimensionError("snapshot grid size out of range");
  const Grid grid(static_cast<int>(n));
  std::vector<Complex> u(static_cast<std::size_t>(2 * n)), v(u.size());
  in.read(reinterpret_cast<char*>(u.data()), static_cast<std::streamsize>(u.size() * sizeof(Complex)));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(Complex)));
  if (!in) throw std::runtime_error("truncated snapshot '" + path + "'");
  return {time, StateU(SpectralField(grid, std::move(u)), SpectralField(grid, std::move(v)))};
}

inline void write_snapshot_csv(const std::string& path, double time, const StateU& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
  const int n = w.grid().half_points();
  out << "# time=" << format_double(time) << " N=" << n << "\n";
  out << "mode,u_re,u_im,v_re,v_im\n";
  for (int l = -n; l < n; ++l) {
    out << l << ',' << format_double(w.u(l).real()) << ',' << format_double(w.u(l).imag()) << ','
        << format_double(w.v(l).real()) << ',' << format_double(w.v(l).imag()) << '\n';
  }
}

inline Snapshot read_snapshot_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  std::string line;
  std::getline(in, line);
  const auto tpos = line.find("time=");
  const auto npos = line.find(" N=");
  if (line.rfind("# ", 0) != 0 || tpos == std::string::npos || npos == std::string::npos) {
    throw std::runtime_error("'" + path + "' lacks a snapshot preamble");
  }
  const double time = parse_double(std::string_view(line).substr(tpos + 5, npos - tpos - 5));
  const int n = static_cast<int>(parse_double(std::string_view(line).substr(npos + 3)));
  std::getline(in, line);
  if (line != "mode,u_re,u_im,v_re,v_im") throw std::runtime_error("unexpected snapshot header in '" + path + "'");

  const Grid grid(n);
  StateU w(grid);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string_view, 5> cells{};
    std::string_view rest(line);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto comma = rest.find(',');
      cells[i] = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    const int l = static_cast<int>(parse_double(cells[0]));
    if (l < -n || l >= n) throw DimensionError("snapshot mode out of range");
    w.u(l) = {parse_double(cells[1]), parse_double(cells[2])};
    w.v(l) = {parse_double(cells[3]), parse_double(cells[4])};
    ++rows;
  }
  if (rows != 2 * n) throw DimensionError("snapshot has " + std::to_string(rows) + " rows, expected " + std::to_string(2 * n));
  return {time, std::move(w)};
}

inline void write_snapshot(const std::string& path, double time, const StateU& w, const std::string& format) {
  if (format == "csv") {
    write_snapshot_csv(path, time, w);
  } else {
    write_snapshot_binary(path, time, w);
  }
}

}  // namespace kgsym
