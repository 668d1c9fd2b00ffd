#include "flost/io.hpp"

#include <json.hpp>

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <unordered_set>

namespace flost {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'F', 'L', 'T', '3'};
constexpr std::uint32_t kTensorVersion = 1;
// Keeps M*N*T*8 comfortably inside a signed 64-bit byte count.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 59;

void put_bytes(std::ostream& out, const unsigned char* b, std::size_t n) {
  out.write(reinterpret_cast<const char*>(b), static_cast<std::streamsize>(n));
}

void put_u32le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 4);
}

void put_u64le(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 8);
}

void put_f64le(std::ostream& out, double v) { put_u64le(out, std::bit_cast<std::uint64_t>(v)); }

bool get_bytes(std::istream& in, unsigned char* b, std::size_t n) {
  in.read(reinterpret_cast<char*>(b), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint32_t u32le(const unsigned char* b) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t u64le(const unsigned char* b) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_tensor(const std::string& path, const DenseTensor3& x) {
  if (!x.all_finite()) throw std::invalid_argument("write_tensor: values must be finite");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("write_tensor: cannot open " + path);
  put_bytes(out, reinterpret_cast<const unsigned char*>(kMagic), 4);
  put_u32le(out, kTensorVersion);
  put_u64le(out, static_cast<std::uint64_t>(x.dims().m));
  put_u64le(out, static_cast<std::uint64_t>(x.dims().n));
  put_u64le(out, static_cast<std::uint64_t>(x.dims().t));
  std::vector<unsigned char> chunk(8 * 8192);
  std::size_t filled = 0;
  for (double v : x.values()) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) chunk[filled++] = static_cast<unsigned char>(bits >> (8 * b));
    if (filled == chunk.size()) {
      put_bytes(out, chunk.data(), filled);
      filled = 0;
    }
  }
  if (filled > 0) put_bytes(out, chunk.data(), filled);
  out.flush();
  if (!out) throw FileError("write_tensor: write failed for " + path);
}

DenseTensor3 read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("read_tensor: cannot open " + path);
  unsigned char header[32];
  if (!get_bytes(in, header, sizeof(header)))
    throw TruncatedFile("read_tensor: incomplete header in " + path);
  if (std::memcmp(header, kMagic, 4) != 0)
    throw BadMagic("read_tensor: bad magic in " + path);
  const std::uint32_t version = u32le(header + 4);
  if (version != kTensorVersion)
    throw BadVersion("read_tensor: unsupported version " + std::to_string(version));
  const std::uint64_t m = u64le(header + 8);
  const std::uint64_t n = u64le(header + 16);
  const std::uint64_t t = u64le(header + 24);
  if (m == 0 || n == 0 || t == 0 || m > kMaxElements || n > kMaxElements / m ||
      t > kMaxElements / (m * n))
    throw DimOverflow("read_tensor: dims " + std::to_string(m) + "x" + std::to_string(n) + "x" +
                      std::to_string(t) + " out of range");
  const std::uint64_t count = m * n * t;
  DenseTensor3 out(
      {static_cast<index_t>(m), static_cast<index_t>(n), static_cast<index_t>(t)});
  std::vector<unsigned char> chunk(8 * 8192);
  std::uint64_t idx = 0;
  while (idx < count) {
    const std::uint64_t want = std::min<std::uint64_t>(count - idx, chunk.size() / 8);
    if (!get_bytes(in, chunk.data(), static_cast<std::size_t>(want * 8)))
      throw TruncatedFile("read_tensor: payload shorter than header dims in " + path);
    for (std::uint64_t k = 0; k < want; ++k, ++idx)
      out.values()[idx] = std::bit_cast<double>(u64le(chunk.data() + 8 * k));
  }
  if (in.get() != std::ifstream::traits_type::eof())
    throw TruncatedFile("read_tensor: payload longer than header dims in " + path);
  return out;
}

void write_observations(const std::string& path, const ObservationSet& obs) {
  obs.validate();
  std::ofstream out(path);
  if (!out) throw FileError("write_observations: cannot open " + path);
  out << "# m=" << obs.dims.m << "\n# n=" << obs.dims.n << "\n# t=" << obs.dims.t << "\n";
  out << "# p=" << format_double(obs.p) << "\n";
  out << "# p_source=" << (obs.p_source == PSource::Given ? "given" : "estimated") << "\n";
  out << "i,j,t,value\n";
  for (const ObservationEntry& e : obs.entries)
    out << e.i << ',' << e.j << ',' << e.t << ',' << format_double(e.value) << "\n";
  out.flush();
  if (!out) throw FileError("write_observations: write failed for " + path);
}

namespace {

bool parse_int(const std::string& s, index_t& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size() || v < 0) return false;
  out = static_cast<index_t>(v);
  return true;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

ObservationSet read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("read_observations: cannot open " + path);
  ObservationSet obs;
  bool have_m = false, have_n = false, have_t = false, have_p = false;
  obs.p_source = PSource::Given;
  std::string line;
  index_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_seen) throw ParseError("read_observations: comment after header", line_no);
      std::string body = line.substr(1);
      const std::size_t ws = body.find_first_not_of(' ');
      body = ws == std::string::npos ? "" : body.substr(ws);
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos)
        throw ParseError("read_observations: metadata line is not key=value", line_no);
      const std::string key = body.substr(0, eq);
      const std::string val = body.substr(eq + 1);
      if (key == "m" || key == "n" || key == "t") {
        index_t v = 0;
        if (!parse_int(val, v) || v < 1)
          throw ParseError("read_observations: bad " + key + " value", line_no);
        (key == "m" ? obs.dims.m : key == "n" ? obs.dims.n : obs.dims.t) = v;
        (key == "m" ? have_m : key == "n" ? have_n : have_t) = true;
      } else if (key == "p") {
        if (!parse_number(val, obs.p))
          throw ParseError("read_observations: bad p value", line_no);
        have_p = true;
      } else if (key == "p_source") {
        if (val == "given")
          obs.p_source = PSource::Given;
        else if (val == "estimated")
          obs.p_source = PSource::Estimated;
        else
          throw ParseError("read_observations: p_source must be given or estimated", line_no);
      }
      // unknown keys are ignored
      continue;
    }
    if (!header_seen) {
      if (line != "i,j,t,value")
        throw ParseError("read_observations: expected header i,j,t,value", line_no);
      if (!have_m || !have_n || !have_t)
        throw ParseError("read_observations: missing dims metadata (# m=, # n=, # t=)", line_no);
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 4)
      throw ParseError("read_observations: expected 4 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    ObservationEntry e;
    if (!parse_int(fields[0], e.i) || !parse_int(fields[1], e.j) || !parse_int(fields[2], e.t))
      throw ParseError("read_observations: bad index field", line_no);
    if (!parse_number(fields[3], e.value))
      throw ParseError("read_observations: bad value field", line_no);
    if (e.i >= obs.dims.m || e.j >= obs.dims.n || e.t >= obs.dims.t)
      throw ParseError("read_observations: index out of range", line_no);
    obs.entries.push_back(e);
  }
  if (!header_seen)
    throw ParseError("read_observations: missing i,j,t,value header", line_no + 1);
  if (!have_p) obs.p_source = PSource::Estimated;
  if (!(obs.p > 0.0) || obs.p > 1.0)
    throw FormatError("read_observations: p must be in (0,1]");

  std::unordered_set<index_t> seen;
  seen.reserve(obs.entries.size());
  for (const ObservationEntry& e : obs.entries)
    if (!seen.insert(obs.linear_index(e)).second)
      throw FormatError("read_observations: duplicate index (" + std::to_string(e.i) + "," +
                        std::to_string(e.j) + "," + std::to_string(e.t) + ")");
  return obs;
}

namespace {

json complex_matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (index_t c = 0; c < m.cols(); ++c)
    for (index_t r = 0; r < m.rows(); ++r) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix complex_matrix_from_json(const json& j, index_t rows, index_t cols) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<index_t>(re.size()) != rows * cols ||
      static_cast<index_t>(im.size()) != rows * cols)
    throw FormatError("read_model: factor size mismatch");
  ComplexMatrix m(rows, cols);
  std::size_t idx = 0;
  for (index_t c = 0; c < cols; ++c)
    for (index_t r = 0; r < rows; ++r, ++idx)
      m(r, c) = cxd(re[idx].get<double>(), im[idx].get<double>());
  return m;
}

}  // namespace

void write_model(const std::string& path, const FlostModel& model, double fit_seconds) {
  json j;
  j["format"] = "flost-model";
  j["version"] = 1;
  j["m"] = model.dims.m;
  j["n"] = model.dims.n;
  j["t"] = model.dims.t;
  j["k"] = model.k;
  j["lambda1"] = model.fitted_lambdas.lambda1;
  j["lambda2"] = model.fitted_lambdas.lambda2;
  j["c1"] = model.fitted_lambdas.c1;
  j["c2"] = model.fitted_lambdas.c2;
  j["sigma_gamma"] = model.fitted_lambdas.sigma_gamma;
  if (fit_seconds >= 0.0) j["fit_seconds"] = fit_seconds;
  json lowrank = json::array();
  for (const SvdFactors& f : model.lowrank) {
    json slice;
    slice["rank"] = f.rank();
    slice["u"] = complex_matrix_to_json(f.u);
    slice["sigma"] = std::vector<double>(f.sigma.data(), f.sigma.data() + f.sigma.size());
    slice["v"] = complex_matrix_to_json(f.v);
    lowrank.push_back(std::move(slice));
  }
  j["lowrank"] = std::move(lowrank);
  json tail = json::array();
  for (const TailEntry& e : model.sparse_tail)
    tail.push_back(json::array({e.slice, e.i, e.j, e.value.real(), e.value.imag()}));
  j["tail"] = std::move(tail);

  std::ofstream out(path);
  if (!out) throw FileError("write_model: cannot open " + path);
  out << j.dump();
  out.flush();
  if (!out) throw FileError("write_model: write failed for " + path);
}

FlostModel read_model(const std::string& path, double* fit_seconds) {
  std::ifstream in(path);
  if (!in) throw FileError("read_model: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(std::string("read_model: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "flost-model")
      throw FormatError("read_model: not a flost-model file");
    if (j.at("version").get<int>() != 1) throw BadVersion("read_model: unsupported version");
    FlostModel model;
    model.dims = {j.at("m").get<index_t>(), j.at("n").get<index_t>(), j.at("t").get<index_t>()};
    DenseTensor3::check_size(model.dims);
    model.k = j.at("k").get<index_t>();
    const SliceIndexPlan plan(model.dims.t, model.k);
    model.fitted_lambdas.k = model.k;
    model.fitted_lambdas.lambda1 = j.at("lambda1").get<std::vector<double>>();
    model.fitted_lambdas.lambda2 = j.at("lambda2").get<double>();
    model.fitted_lambdas.c1 = j.at("c1").get<double>();
    model.fitted_lambdas.c2 = j.at("c2").get<double>();
    model.fitted_lambdas.sigma_gamma = j.at("sigma_gamma").get<double>();
    model.fitted_lambdas.validate(model.dims);
    if (fit_seconds != nullptr)
      *fit_seconds = j.contains("fit_seconds") ? j["fit_seconds"].get<double>() : -1.0;
    for (const json& slice : j.at("lowrank")) {
      const index_t rank = slice.at("rank").get<index_t>();
      if (rank < 0 || rank > std::min(model.dims.m, model.dims.n))
        throw FormatError("read_model: rank out of range");
      SvdFactors f;
      f.u = complex_matrix_from_json(slice.at("u"), model.dims.m, rank);
      const std::vector<double> sigma = slice.at("sigma").get<std::vector<double>>();
      if (static_cast<index_t>(sigma.size()) != rank)
        throw FormatError("read_model: sigma size mismatch");
      f.sigma = Eigen::Map<const Eigen::VectorXd>(sigma.data(), rank);
      f.v = complex_matrix_from_json(slice.at("v"), model.dims.n, rank);
      model.lowrank.push_back(std::move(f));
    }
    if (static_cast<index_t>(model.lowrank.size()) != model.k)
      throw FormatError("read_model: expected K low-rank slices");
    for (const json& e : j.at("tail")) {
      if (!e.is_array() || e.size() != 5) throw FormatError("read_model: bad tail entry");
      TailEntry entry{e[0].get<index_t>(), e[1].get<index_t>(), e[2].get<index_t>(),
                      cxd(e[3].get<double>(), e[4].get<double>())};
      if (entry.slice < model.k || entry.slice >= plan.half || entry.i < 0 ||
          entry.i >= model.dims.m || entry.j < 0 || entry.j >= model.dims.n)
        throw FormatError("read_model: tail entry out of range");
      model.sparse_tail.push_back(entry);
    }
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("read_model: missing or mistyped field: ") + e.what());
  }
}

void write_tuning_table(const std::string& path, const TuningResult& result) {
  std::ofstream out(path);
  if (!out) throw FileError("write_tuning_table: cannot open " + path);
  out << "scale1,scale2,validation_rmse\n";
  for (const TuningRow& row : result.table)
    out << format_double(row.scale1) << ',' << format_double(row.scale2) << ','
        << format_double(row.validation_rmse) << "\n";
  out.flush();
  if (!out) throw FileError("write_tuning_table: write failed for " + path);
}

std::string report_record_json(const RmseReport& report) {
  json j;
  j["label"] = report.label;
  j["count"] = report.count;
  if (report.absent())
    j["value"] = nullptr;
  else
    j["value"] = report.value;
  return j.dump();
}

}  // namespace flost
