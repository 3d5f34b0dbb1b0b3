#pragma once
// Shoulder motion database: a 22 x 3 lattice of measured joint rotations per
// joint, indexed by humerothoracic elevation theta (15..120 step 5 degrees)
// and plane of elevation psi (0 frontal, 40 scapular, 90 sagittal).

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "scapula_ik/errors.hpp"
#include "scapula_ik/quaternion.hpp"
#include "scapula_ik/shoulder.hpp"

namespace scapula_ik {

inline constexpr std::size_t kThetaKnots = 22;
inline constexpr std::size_t kPsiKnots = 3;

inline constexpr std::string_view kCsvHeader = "joint,theta_deg,psi_deg,e1_deg,e2_deg,e3_deg";

struct GridAxes {
  std::array<double, kThetaKnots> theta_knots{};
  std::array<double, kPsiKnots> psi_knots{0.0, 40.0, 90.0};

  static constexpr GridAxes standard() noexcept {
    GridAxes axes;
    for (std::size_t i = 0; i < kThetaKnots; ++i) axes.theta_knots[i] = 15.0 + 5.0 * static_cast<double>(i);
    return axes;
  }

  double theta_min() const noexcept { return theta_knots.front(); }
  double theta_max() const noexcept { return theta_knots.back(); }
  double psi_min() const noexcept { return psi_knots.front(); }
  double psi_max() const noexcept { return psi_knots.back(); }

  /// Exact knot lookup; nullopt when the value is off the lattice.
  std::optional<std::size_t> theta_index(double theta) const noexcept {
    for (std::size_t i = 0; i < kThetaKnots; ++i)
      if (theta_knots[i] == theta) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> psi_index(double psi) const noexcept {
    for (std::size_t j = 0; j < kPsiKnots; ++j)
      if (psi_knots[j] == psi) return j;
    return std::nullopt;
  }

  friend constexpr bool operator==(const GridAxes&, const GridAxes&) = default;
};

template <typename T>
using Lattice = std::array<std::array<T, kPsiKnots>, kThetaKnots>;

/// Per-joint rotation lattice. `quat` is derived from `euler` and
/// hemisphere-aligned: the first row left to right, then each psi column
/// downward in theta.
class JointRotationGrid {
 public:
  JointRotationGrid() = default;

  /// Throws GimbalSingularity if any triple is singular for its sequence.
  JointRotationGrid(JointId joint, const Lattice<EulerTriple>& euler, GridAxes axes = GridAxes::standard())
      : joint_(joint), axes_(axes), euler_(euler) {
    for (std::size_t i = 0; i < kThetaKnots; ++i)
      for (std::size_t j = 0; j < kPsiKnots; ++j) quat_[i][j] = euler_to_quat(euler_[i][j]);
    for (std::size_t j = 1; j < kPsiKnots; ++j) quat_[0][j] = align_hemisphere(quat_[0][j - 1], quat_[0][j]);
    for (std::size_t j = 0; j < kPsiKnots; ++j)
      for (std::size_t i = 1; i < kThetaKnots; ++i) quat_[i][j] = align_hemisphere(quat_[i - 1][j], quat_[i][j]);
  }

  JointId joint() const noexcept { return joint_; }
  const GridAxes& axes() const noexcept { return axes_; }
  const Lattice<EulerTriple>& euler() const noexcept { return euler_; }
  const Lattice<UnitQuaternion>& quat() const noexcept { return quat_; }

  const UnitQuaternion& at(std::size_t i, std::size_t j) const {
    if (i >= kThetaKnots || j >= kPsiKnots)
      throw IndexOutOfRange("grid index (" + std::to_string(i) + ", " + std::to_string(j) + ") outside 22x3");
    return quat_[i][j];
  }

  friend bool operator==(const JointRotationGrid& a, const JointRotationGrid& b) {
    return a.joint_ == b.joint_ && a.axes_ == b.axes_ && a.euler_ == b.euler_;
  }

 private:
  JointId joint_ = JointId::SC;
  GridAxes axes_ = GridAxes::standard();
  Lattice<EulerTriple> euler_{};
  Lattice<UnitQuaternion> quat_{};
};

struct DatabaseMetadata {
  std::string source = "unspecified";
  std::array<EulerSequence, 3> sequences{joint_sequence(JointId::SC), joint_sequence(JointId::AC),
                                         joint_sequence(JointId::GH)};

  friend bool operator==(const DatabaseMetadata&, const DatabaseMetadata&) = default;
};

/// Immutable after construction; safe for concurrent readers.
class MotionDatabase {
 public:
  MotionDatabase(std::array<JointRotationGrid, 3> grids, DatabaseMetadata metadata)
      : grids_(std::move(grids)), metadata_(std::move(metadata)) {
    for (JointId j : kJoints) {
      if (grids_[index_of(j)].joint() != j) throw InvalidArgument("grid order must be SC, AC, GH");
      if (!(grids_[index_of(j)].axes() == grids_[0].axes())) throw AxisMismatch("joint grids use different axes");
    }
  }

  const JointRotationGrid& grid(JointId j) const noexcept { return grids_[index_of(j)]; }
  const GridAxes& axes() const noexcept { return grids_[0].axes(); }
  const DatabaseMetadata& metadata() const noexcept { return metadata_; }

  friend bool operator==(const MotionDatabase&, const MotionDatabase&) = default;

 private:
  std::array<JointRotationGrid, 3> grids_;
  DatabaseMetadata metadata_;
};

/// Cached hemisphere-aligned rotation at (theta index i, psi index j).
inline const UnitQuaternion& get(const MotionDatabase& db, JointId joint, std::size_t i, std::size_t j) {
  return db.grid(joint).at(i, j);
}

/// Re-checks the cache invariants of a loaded database; empty when valid.
inline std::vector<std::string> check_invariants(const MotionDatabase& db) {
  std::vector<std::string> problems;
  for (JointId jt : kJoints) {
    const auto& g = db.grid(jt);
    for (std::size_t j = 0; j < kPsiKnots; ++j)
      for (std::size_t i = 0; i < kThetaKnots; ++i) {
        const auto& q = g.quat()[i][j];
        const double n = std::sqrt(dot(q, q));
        if (std::abs(n * n - 1.0) > 1e-9)
          problems.push_back(std::string(to_string(jt)) + " cell (" + std::to_string(i) + "," + std::to_string(j) + ") not unit");
        if (angular_distance(q, euler_to_quat(g.euler()[i][j])) != 0.0)
          problems.push_back(std::string(to_string(jt)) + " cell (" + std::to_string(i) + "," + std::to_string(j) +
                             ") quaternion cache disagrees with Euler angles");
        if (i > 0 && dot(g.quat()[i - 1][j], q) < 0.0)
          problems.push_back(std::string(to_string(jt)) + " column " + std::to_string(j) +
                             " not hemisphere-aligned at theta index " + std::to_string(i));
      }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_number(std::string_view s) noexcept {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Shortest plain-decimal text that parses back to exactly `v`.
inline std::string format_exact(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[400];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

inline std::string cell_name(JointId j, double theta, double psi) {
  return std::string(to_string(j)) + "(" + format_exact(theta) + "," + format_exact(psi) + ")";
}

}  // namespace detail

/// Parses the database CSV schema: an optional `#` metadata block
/// (`source=`, `sequence.SC=` etc.), the exact header line, then 198 rows.
inline MotionDatabase parse_csv(std::istream& in) {
  const GridAxes axes = GridAxes::standard();
  DatabaseMetadata meta;
  std::array<Lattice<EulerTriple>, 3> euler{};
  std::array<Lattice<bool>, 3> seen{};
  std::array<Lattice<std::size_t>, 3> row_line{};

  std::string raw_line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string_view line = detail::trim(raw_line);
    if (line.empty()) continue;

    if (line.front() == '#') {
      if (have_header) throw ParseError(line_no, "comment lines must precede the header");
      const std::string_view body = detail::trim(line.substr(1));
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = detail::trim(body.substr(0, eq));
      const std::string_view value = detail::trim(body.substr(eq + 1));
      if (key == "source") {
        meta.source = std::string(value);
      } else if (key == "units") {
        if (value != "deg" && value != "degrees") throw UnitsError("database units must be degrees, got '" + std::string(value) + "'");
      } else if (key.starts_with("sequence.")) {
        const auto joint = parse_joint(key.substr(9));
        const auto seq = EulerSequence::parse(value);
        if (!joint) throw ParseError(line_no, "unknown joint in metadata key '" + std::string(key) + "'");
        if (!seq) throw ParseError(line_no, "bad Euler sequence '" + std::string(value) + "'");
        meta.sequences[index_of(*joint)] = *seq;
      }
      continue;
    }

    if (!have_header) {
      if (line != kCsvHeader) {
        if (line.find("_rad") != std::string_view::npos)
          throw UnitsError("header declares radians; angles must be in degrees");
        throw ParseError(line_no, "expected header '" + std::string(kCsvHeader) + "'");
      }
      have_header = true;
      continue;
    }

    const auto fields = detail::split(line, ',');
    if (fields.size() != 6)
      throw ParseError(line_no, "expected 6 fields, got " + std::to_string(fields.size()));
    const auto joint = parse_joint(detail::trim(fields[0]));
    if (!joint) throw ParseError(line_no, "unknown joint '" + std::string(fields[0]) + "'");
    std::array<double, 5> num{};
    for (std::size_t f = 0; f < 5; ++f) {
      const auto v = detail::parse_number(fields[f + 1]);
      if (!v) throw ParseError(line_no, "malformed number '" + std::string(fields[f + 1]) + "'");
      num[f] = *v;
    }
    const auto i = axes.theta_index(num[0]);
    const auto j = axes.psi_index(num[1]);
    if (!i) throw AxisMismatch("line " + std::to_string(line_no) + ": theta_deg " + detail::format_exact(num[0]) +
                               " is not a grid knot (15..120 step 5)");
    if (!j) throw AxisMismatch("line " + std::to_string(line_no) + ": psi_deg " + detail::format_exact(num[1]) +
                               " is not a grid knot (0, 40, 90)");
    const std::size_t g = index_of(*joint);
    if (seen[g][*i][*j])
      throw DuplicateCell("line " + std::to_string(line_no) + ": duplicate cell " +
                          detail::cell_name(*joint, num[0], num[1]) + " (first at line " +
                          std::to_string(row_line[g][*i][*j]) + ")");
    seen[g][*i][*j] = true;
    row_line[g][*i][*j] = line_no;
    euler[g][*i][*j] = {num[2], num[3], num[4], EulerSequence{}};
  }
  if (!have_header) throw ParseError(line_no, "missing header line");

  std::vector<std::string> missing;
  for (JointId jt : kJoints)
    for (std::size_t j = 0; j < kPsiKnots; ++j)
      for (std::size_t i = 0; i < kThetaKnots; ++i)
        if (!seen[index_of(jt)][i][j]) missing.push_back(detail::cell_name(jt, axes.theta_knots[i], axes.psi_knots[j]));
  if (!missing.empty()) {
    std::string msg = "incomplete grid, " + std::to_string(missing.size()) + " missing cell(s):";
    for (std::size_t k = 0; k < missing.size() && k < 20; ++k) msg += " " + missing[k];
    if (missing.size() > 20) msg += " ...";
    throw IncompleteGrid(msg, std::move(missing));
  }

  std::array<JointRotationGrid, 3> grids;
  for (JointId jt : kJoints) {
    const std::size_t g = index_of(jt);
    for (auto& row : euler[g])
      for (auto& e : row) e.sequence = meta.sequences[g];
    try {
      grids[g] = JointRotationGrid(jt, euler[g], axes);
    } catch (const GimbalSingularity& e) {
      throw GimbalSingularity(std::string(to_string(jt)) + ": " + e.what());
    }
  }
  return MotionDatabase(grids, meta);
}

inline MotionDatabase load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open database '" + path + "'");
  return parse_csv(in);
}

/// Canonical form: metadata block, header, rows ordered by joint (SC, AC, GH),
/// then psi, then theta. Angles are written in the shortest decimal form that
/// reads back bit-exactly.
inline void write_csv(const MotionDatabase& db, std::ostream& out) {
  const auto& meta = db.metadata();
  out << "# source=" << meta.source << '\n';
  for (JointId j : kJoints) out << "# sequence." << to_string(j) << '=' << meta.sequences[index_of(j)].label() << '\n';
  out << kCsvHeader << '\n';
  const GridAxes& axes = db.axes();
  for (JointId jt : kJoints) {
    const auto& euler = db.grid(jt).euler();
    for (std::size_t j = 0; j < kPsiKnots; ++j)
      for (std::size_t i = 0; i < kThetaKnots; ++i) {
        const EulerTriple& e = euler[i][j];
        out << to_string(jt) << ',' << detail::format_exact(axes.theta_knots[i]) << ','
            << detail::format_exact(axes.psi_knots[j]) << ',' << detail::format_exact(e.a1) << ','
            << detail::format_exact(e.a2) << ',' << detail::format_exact(e.a3) << '\n';
      }
  }
}

inline std::string to_csv_string(const MotionDatabase& db) {
  std::ostringstream out;
  write_csv(db, out);
  return out.str();
}

inline void export_csv(const MotionDatabase& db, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write database '" + path + "'");
  write_csv(db, out);
  out.flush();
  if (!out) throw Error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Scapulohumeral rhythm bookkeeping and the synthetic generator

/// Scapulothoracic upward rotation realized by the SC and AC joints:
/// clavicle elevation (negative SC middle angle lifts the clavicle) plus
/// scapular upward rotation (AC middle angle).
inline double st_upward_rotation(const EulerTriple& sc, const EulerTriple& ac) noexcept { return -sc.a2 + ac.a2; }

/// Glenohumeral elevation magnitude from a Y-X'-Y'' triple. Stored data use
/// the negative-elevation branch; decompositions return the positive one.
inline double gh_elevation(const EulerTriple& gh) noexcept { return std::abs(gh.a2); }

struct SyntheticRhythm {
  /// Humerothoracic elevation below which the scapula stays at rest.
  double onset_deg = 30.0;
  /// GH : ST increment ratio above the onset.
  double gh_to_st = 2.0;
  /// Share of ST upward rotation realized as SC elevation (rest goes to AC).
  double sc_share = 0.4;

  double st(double theta) const noexcept {
    return theta <= onset_deg ? 0.0 : (theta - onset_deg) / (1.0 + gh_to_st);
  }
  double gh(double theta) const noexcept { return theta - st(theta); }
};

/// Euler triples (SC, AC, GH) of the synthetic model at one (theta, psi).
///
/// ST upward rotation is zero below the onset and accrues at one third of the
/// elevation increment above it, so GH elevation + ST upward rotation = theta
/// in every plane. The remaining DOFs are low-order polynomials in
/// u = (theta-15)/105 and p = psi/90 with magnitudes under 30 degrees; the GH
/// plane of elevation follows psi. Scapular internal rotation and humeral
/// axial rotation carry a quadratic term in p, so the rotations are not a
/// single geodesic across the three planes.
inline std::array<EulerTriple, 3> synthetic_cell(double theta, double psi, const SyntheticRhythm& rhythm = {}) {
  const double u = (theta - 15.0) / 105.0;
  const double p = psi / 90.0;
  const double st = rhythm.st(theta);
  const auto clean = [](double v) { return v + 0.0; };

  const double bump = 4.0 * p * (1.0 - p);  // peaks between the scapular and sagittal planes

  const EulerTriple sc{clean(-(15.0 + 6.0 * u + 8.0 * p - 4.0 * u * p)), clean(-rhythm.sc_share * st),
                       clean(-(2.0 + 20.0 * u * u + 3.0 * p)), joint_sequence(JointId::SC)};
  const EulerTriple ac{clean(20.0 - 4.0 * u + 8.0 * bump - 6.0 * u * p), clean((1.0 - rhythm.sc_share) * st),
                       clean(8.0 + 12.0 * u - 5.0 * p), joint_sequence(JointId::AC)};
  const EulerTriple gh{clean(psi - 20.0 + 8.0 * u), clean(-rhythm.gh(theta)),
                       clean(-(5.0 + 10.0 * u) + 12.0 * bump), joint_sequence(JointId::GH)};
  return {sc, ac, gh};
}

/// Deterministic stand-in for measured data; see synthetic_cell().
inline MotionDatabase generate_synthetic(const SyntheticRhythm& rhythm = {}) {
  const GridAxes axes = GridAxes::standard();
  std::array<Lattice<EulerTriple>, 3> euler{};
  for (std::size_t i = 0; i < kThetaKnots; ++i)
    for (std::size_t j = 0; j < kPsiKnots; ++j) {
      const auto cell = synthetic_cell(axes.theta_knots[i], axes.psi_knots[j], rhythm);
      for (JointId jt : kJoints) euler[index_of(jt)][i][j] = cell[index_of(jt)];
    }
  DatabaseMetadata meta;
  meta.source = "synthetic";
  std::array<JointRotationGrid, 3> grids;
  for (JointId jt : kJoints) grids[index_of(jt)] = JointRotationGrid(jt, euler[index_of(jt)], axes);
  return MotionDatabase(grids, meta);
}

}  // namespace scapula_ik
