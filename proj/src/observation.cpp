#include "hinv/observation.hpp"

#include <cmath>
#include <string>

#include "hinv/binary_io.hpp"
#include "hinv/error.hpp"
#include "hinv/rng.hpp"

// Measurement file layout (little endian):
//   "HINV" u16 version
//   u64 header length, header bytes, u32 crc32 of the header bytes
//     header: grid descriptor, f64 diffusion, f64 dt, f64 t0, f64 t1,
//             u32 sample stride, u32 sample count, u64 omega size, u64[] omega nodes
//   block "INIT" initial density
//   block "DTUR" du/dt record, sample-major
//   block "SNAP" snapshot u(T')
//   block "SLAP" snapshot Laplacian
// Each block is [tag u32][count u64][f64 payload][crc32 u32].

namespace hinv {

namespace {

constexpr std::uint32_t kMagic = io::fourcc("HINV");
constexpr std::uint16_t kVersion = 1;
constexpr std::uint32_t kInitTag = io::fourcc("INIT");
constexpr std::uint32_t kRecordTag = io::fourcc("DTUR");
constexpr std::uint32_t kSnapshotTag = io::fourcc("SNAP");
constexpr std::uint32_t kLaplacianTag = io::fourcc("SLAP");

std::int64_t sample_intervals(const ObservationWindow& w, double dt) {
  const std::int64_t start = step_index(w.t0, dt);
  const std::int64_t stop = step_index(w.t1, dt);
  const std::int64_t span = stop - start;
  if (span % w.sample_stride != 0) throw InvalidArgument("window length is not a multiple of the sample spacing");
  return span / w.sample_stride;
}

}  // namespace

void ObservationWindow::validate(double dt) const {
  if (!(t0 > 0.0) || !(t1 > t0)) throw InvalidArgument("observation window needs 0 < t0 < t1");
  if (sample_stride < 1) throw InvalidArgument("sample stride must be positive");
  if (omega.empty()) throw InvalidArgument("observation mask is empty");
  const auto k = sample_intervals(*this, dt);
  if (k < 2) throw InvalidArgument("observation window needs at least three samples");
  if (k % 2 != 0) throw InvalidArgument("snapshot time (t0 + t1) / 2 does not fall on a sample");
}

std::vector<double> ObservationWindow::sample_times(double dt) const {
  validate(dt);
  const auto k = sample_intervals(*this, dt);
  const std::int64_t start = step_index(t0, dt);
  std::vector<double> out;
  for (std::int64_t i = 0; i <= k; ++i) out.push_back(static_cast<double>(start + i * sample_stride) * dt);
  return out;
}

std::vector<double> MeasurementSet::sample_times() const {
  const std::int64_t start = step_index(t0, dt);
  std::vector<double> out;
  for (int i = 0; i < sample_count(); ++i)
    out.push_back(static_cast<double>(start + static_cast<std::int64_t>(i) * sample_stride) * dt);
  return out;
}

ObservationWindow MeasurementSet::window() const {
  return ObservationWindow{t0, t1, sample_stride, NodeMask(grid->node_count(), omega)};
}

bool operator==(const MeasurementSet& a, const MeasurementSet& b) {
  return a.grid && b.grid && a.grid->same_layout(*b.grid) && a.diffusion == b.diffusion && a.dt == b.dt &&
         a.t0 == b.t0 && a.t1 == b.t1 && a.sample_stride == b.sample_stride && a.omega == b.omega &&
         a.initial_density == b.initial_density && a.dtu_record == b.dtu_record && a.snapshot == b.snapshot &&
         a.snapshot_laplacian == b.snapshot_laplacian;
}

Eigen::MatrixXd time_derivative(const Eigen::MatrixXd& samples, double spacing) {
  const Index k = samples.rows();
  if (k < 3) throw InvalidArgument("time derivative needs at least three samples");
  Eigen::MatrixXd d(k, samples.cols());
  const double s = 1.0 / (2.0 * spacing);
  d.row(0) = (-3.0 * samples.row(0) + 4.0 * samples.row(1) - samples.row(2)) * s;
  for (Index i = 1; i < k - 1; ++i) d.row(i) = (samples.row(i + 1) - samples.row(i - 1)) * s;
  d.row(k - 1) = (3.0 * samples.row(k - 1) - 4.0 * samples.row(k - 2) + samples.row(k - 3)) * s;
  return d;
}

SolverParams measurement_solver_params(double diffusion, double gamma, double dt, double t_end,
                                       const ObservationWindow& window) {
  SolverParams p{diffusion, gamma, dt, t_end, {}};
  p.record_times.push_back(0.0);
  for (double t : window.sample_times(dt)) p.record_times.push_back(t);
  if (p.record_times.back() < t_end * (1 - 1e-12)) p.record_times.push_back(t_end);
  p.validate();
  return p;
}

MeasurementSet extract_measurements(const Trajectory& trajectory, const ObservationWindow& window) {
  const double dt = trajectory.params.dt;
  window.validate(dt);
  const auto& grid = trajectory.mu.grid_ptr();
  if (window.omega.node_count() != grid->node_count()) throw GridMismatch("observation mask was built for another grid");

  const auto times = window.sample_times(dt);
  const auto& omega = window.omega.indices();
  Eigen::MatrixXd samples(static_cast<Index>(times.size()), static_cast<Index>(omega.size()));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Field& u = trajectory.at(times[k]);
    for (std::size_t j = 0; j < omega.size(); ++j) samples(static_cast<Index>(k), static_cast<Index>(j)) = u[omega[j]];
  }

  MeasurementSet ms;
  ms.grid = grid;
  ms.diffusion = trajectory.params.diffusion;
  ms.dt = dt;
  ms.t0 = window.t0;
  ms.t1 = window.t1;
  ms.sample_stride = window.sample_stride;
  ms.omega = omega;
  ms.initial_density = trajectory.initial.values();
  ms.dtu_record = time_derivative(samples, window.sample_stride * dt);
  const Field& snap = trajectory.at(window.t_prime());
  ms.snapshot = snap.values();
  ms.snapshot_laplacian = discrete_laplacian(snap).values();
  return ms;
}

void add_measurement_noise(MeasurementSet& ms, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise level must be nonnegative");
  if (sigma == 0.0) return;
  Rng rng = Rng::stream(seed, kNoiseStream);
  for (Index i = 0; i < ms.dtu_record.size(); ++i) ms.dtu_record.data()[i] += sigma * rng.normal();
  for (Index n : ms.grid->interior()) ms.snapshot[n] += sigma * rng.normal();
  for (Index n : ms.grid->interior()) ms.snapshot_laplacian[n] += sigma * rng.normal();
}

void save_measurements(const MeasurementSet& ms, const std::filesystem::path& path) {
  io::ByteWriter header;
  io::put_grid(header, *ms.grid);
  header.put(ms.diffusion);
  header.put(ms.dt);
  header.put(ms.t0);
  header.put(ms.t1);
  header.put(static_cast<std::uint32_t>(ms.sample_stride));
  header.put(static_cast<std::uint32_t>(ms.sample_count()));
  header.put(static_cast<std::uint64_t>(ms.omega.size()));
  for (Index n : ms.omega) header.put(static_cast<std::uint64_t>(n));

  io::ByteWriter out;
  out.put(kMagic);
  out.put(kVersion);
  out.put(static_cast<std::uint64_t>(header.bytes().size()));
  out.put_bytes(header.bytes());
  out.put(io::crc32(header.bytes()));

  // Row-major copy of the record so samples are contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> record = ms.dtu_record;
  out.put_block(kInitTag, std::span<const double>(ms.initial_density.data(), ms.initial_density.size()));
  out.put_block(kRecordTag, std::span<const double>(record.data(), record.size()));
  out.put_block(kSnapshotTag, std::span<const double>(ms.snapshot.data(), ms.snapshot.size()));
  out.put_block(kLaplacianTag, std::span<const double>(ms.snapshot_laplacian.data(), ms.snapshot_laplacian.size()));
  out.write_file(path);
}

MeasurementSet load_measurements(const std::filesystem::path& path) {
  auto in = io::ByteReader::from_file(path);
  if (in.get<std::uint32_t>("magic") != kMagic) throw FormatError("not a measurement file: " + path.string());
  const auto version = in.get<std::uint16_t>("version");
  if (version != kVersion) {
    throw FormatError("unsupported measurement file version " + std::to_string(version) + " (expected " +
                      std::to_string(kVersion) + ")");
  }
  const auto header_len = in.get<std::uint64_t>("header");
  if (header_len > in.remaining()) throw FormatError("truncated file while reading header");
  const auto header_bytes = in.take(header_len, "header");
  if (io::crc32(header_bytes) != in.get<std::uint32_t>("header")) throw FormatError("checksum mismatch in section header");

  io::ByteReader h(std::vector<std::byte>(header_bytes.begin(), header_bytes.end()));
  MeasurementSet ms;
  ms.grid = std::make_shared<const Grid>(io::get_grid(h));
  ms.diffusion = h.get<double>("header");
  ms.dt = h.get<double>("header");
  ms.t0 = h.get<double>("header");
  ms.t1 = h.get<double>("header");
  ms.sample_stride = static_cast<int>(h.get<std::uint32_t>("header"));
  const auto samples = static_cast<Index>(h.get<std::uint32_t>("header"));
  const auto omega_size = h.get<std::uint64_t>("header");
  if (omega_size > h.remaining() / sizeof(std::uint64_t)) throw FormatError("truncated file while reading header");
  ms.omega.resize(omega_size);
  for (auto& n : ms.omega) {
    n = static_cast<Index>(h.get<std::uint64_t>("header"));
    if (n < 0 || n >= ms.grid->node_count()) throw FormatError("observation node outside the grid");
  }

  const Index nodes = ms.grid->node_count();
  const auto init = in.get_block(kInitTag, "initial density");
  const auto record = in.get_block(kRecordTag, "dtu record");
  const auto snap = in.get_block(kSnapshotTag, "snapshot");
  const auto lap = in.get_block(kLaplacianTag, "snapshot laplacian");
  if (static_cast<Index>(init.size()) != nodes || static_cast<Index>(snap.size()) != nodes ||
      static_cast<Index>(lap.size()) != nodes ||
      record.size() != static_cast<std::size_t>(samples) * omega_size) {
    throw FormatError("measurement block sizes are inconsistent with the header");
  }
  ms.initial_density = Eigen::Map<const Eigen::VectorXd>(init.data(), nodes);
  ms.dtu_record = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      record.data(), samples, static_cast<Index>(omega_size));
  ms.snapshot = Eigen::Map<const Eigen::VectorXd>(snap.data(), nodes);
  ms.snapshot_laplacian = Eigen::Map<const Eigen::VectorXd>(lap.data(), nodes);
  return ms;
}

}  // namespace hinv
