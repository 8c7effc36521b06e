#include "hybridiq/json_io.hpp"

#include <fstream>
#include <sstream>

#include "hybridiq/error.hpp"

namespace hybridiq::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    parse_error(std::string(what) + ": " + e.what());
  }
}

std::vector<CMatrix> matrices_from_json(const json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array of matrices");
  std::vector<CMatrix> out;
  out.reserve(j.size());
  for (const json& item : j) out.push_back(matrix_from_json(item));
  return out;
}

json matrices_to_json(const std::vector<CMatrix>& ms) {
  json out = json::array();
  for (const CMatrix& m : ms) out.push_back(to_json(m));
  return out;
}

std::optional<ClassicalSpace> optional_space(const json& j, const char* key) {
  if (j.contains(key)) return space_from_json(j.at(key));
  return std::nullopt;
}

}  // namespace

json to_json(const CMatrix& m) {
  json out;
  if (m.rows() == m.cols()) {
    out["dim"] = m.rows();
  } else {
    out["rows"] = m.rows();
    out["cols"] = m.cols();
  }
  std::vector<double> re;
  std::vector<double> im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  out["re"] = re;
  out["im"] = im;
  return out;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_object()) parse_error("matrix must be an object");
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (j.contains("dim")) {
    rows = cols = get_as<Eigen::Index>(j.at("dim"), "matrix dim");
  } else {
    rows = get_as<Eigen::Index>(field(j, "rows"), "matrix rows");
    cols = get_as<Eigen::Index>(field(j, "cols"), "matrix cols");
  }
  if (rows < 1 || cols < 1) parse_error("matrix dimensions must be positive");
  const auto re = get_as<std::vector<double>>(field(j, "re"), "matrix re");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) im = get_as<std::vector<double>>(j.at("im"), "matrix im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols || im.size() != re.size()) {
    parse_error("matrix of " + std::to_string(rows) + "x" + std::to_string(cols) + " needs that many re/im entries");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto k = static_cast<std::size_t>(i * cols + c);
      m(i, c) = Complex(re[k], im[k]);
    }
  return m;
}

json to_json(const ClassicalSpace& space) {
  json out;
  out["weights"] = space.weights();
  if (!space.labels().empty()) {
    json labels = json::array();
    for (const CellLabel& label : space.labels()) {
      if (const auto* iv = std::get_if<Interval>(&label)) {
        labels.push_back(json::array({iv->lo, iv->hi}));
      } else {
        labels.push_back(std::get<long long>(label));
      }
    }
    out["labels"] = labels;
  }
  return out;
}

ClassicalSpace space_from_json(const json& j) {
  auto weights = get_as<std::vector<double>>(field(j, "weights"), "space weights");
  std::vector<CellLabel> labels;
  if (j.contains("labels") && !j.at("labels").is_null()) {
    for (const json& label : j.at("labels")) {
      if (label.is_array() && label.size() == 2) {
        labels.emplace_back(Interval{get_as<double>(label[0], "label"), get_as<double>(label[1], "label")});
      } else if (label.is_number_integer()) {
        labels.emplace_back(label.get<long long>());
      } else {
        parse_error("space label must be [lo, hi] or an integer");
      }
    }
  }
  return ClassicalSpace(std::move(weights), std::move(labels));
}

json to_json(const MarkovKernel& kernel) {
  const RMatrix& p = kernel.matrix();
  std::vector<double> flat;
  flat.reserve(p.size());
  for (Eigen::Index m = 0; m < p.rows(); ++m)
    for (Eigen::Index n = 0; n < p.cols(); ++n) flat.push_back(p(m, n));
  return json{{"P", flat}, {"rows", p.rows()}, {"cols", p.cols()}};
}

MarkovKernel kernel_from_json(const json& j, const ClassicalSpace* src, const ClassicalSpace* dst) {
  const auto rows = get_as<Eigen::Index>(field(j, "rows"), "kernel rows");
  const auto cols = get_as<Eigen::Index>(field(j, "cols"), "kernel cols");
  const auto flat = get_as<std::vector<double>>(field(j, "P"), "kernel P");
  if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(flat.size()) != rows * cols) {
    parse_error("kernel P must have rows*cols entries");
  }
  RMatrix p(rows, cols);
  for (Eigen::Index m = 0; m < rows; ++m)
    for (Eigen::Index n = 0; n < cols; ++n) p(m, n) = flat[static_cast<std::size_t>(m * cols + n)];
  const ClassicalSpace s = src ? *src : ClassicalSpace::counting(static_cast<std::size_t>(cols));
  const ClassicalSpace d = dst ? *dst : ClassicalSpace::counting(static_cast<std::size_t>(rows));
  return MarkovKernel(s, d, std::move(p));
}

json to_json(const HybridState& w) {
  return json{{"space", to_json(w.space())}, {"qdim", w.qdim()}, {"masses", matrices_to_json(w.masses())}};
}

RawState raw_state_from_json(const json& j) {
  ClassicalSpace space = space_from_json(field(j, "space"));
  const int qdim = get_as<int>(field(j, "qdim"), "state qdim");
  std::vector<CMatrix> masses = matrices_from_json(field(j, "masses"), "state masses");
  if (masses.size() != space.size()) parse_error("state has " + std::to_string(masses.size()) + " masses for " + std::to_string(space.size()) + " cells");
  for (const CMatrix& m : masses) {
    if (m.rows() != qdim || m.cols() != qdim) parse_error("state mass does not match qdim " + std::to_string(qdim));
  }
  return RawState{std::move(space), qdim, std::move(masses)};
}

HybridState state_from_json(const json& j) {
  RawState raw = raw_state_from_json(j);
  return HybridState(std::move(raw.space), std::move(raw.masses));
}

json to_json(const HybridChannel& channel) {
  json blocks = json::array();
  for (const BlockEntry& entry : channel.entries()) {
    blocks.push_back(json{{"m", entry.m}, {"n", entry.n}, {"L", matrices_to_json(entry.ops)}});
  }
  return json{{"src_space", to_json(channel.src())},
              {"dst_space", to_json(channel.dst())},
              {"qdim_src", channel.qdim_src()},
              {"qdim_dst", channel.qdim_dst()},
              {"blocks", blocks}};
}

RawChannel raw_channel_from_json(const json& j) {
  RawChannel raw{space_from_json(field(j, "src_space")), space_from_json(field(j, "dst_space")),
                 get_as<int>(field(j, "qdim_src"), "qdim_src"), get_as<int>(field(j, "qdim_dst"), "qdim_dst"), {}};
  const json& blocks = field(j, "blocks");
  if (!blocks.is_array()) parse_error("blocks must be an array");
  for (const json& b : blocks) {
    raw.blocks.push_back(BlockEntry{get_as<std::size_t>(field(b, "m"), "block m"),
                                    get_as<std::size_t>(field(b, "n"), "block n"),
                                    matrices_from_json(field(b, "L"), "block L")});
  }
  return raw;
}

HybridChannel channel_from_json(const json& j) {
  if (!j.contains("type")) {
    RawChannel raw = raw_channel_from_json(j);
    return HybridChannel(std::move(raw.src), std::move(raw.dst), raw.qdim_src, raw.qdim_dst, std::move(raw.blocks));
  }
  const auto type = get_as<std::string>(j.at("type"), "channel type");
  const std::optional<ClassicalSpace> src = optional_space(j, "src_space");
  const std::optional<ClassicalSpace> dst = optional_space(j, "dst_space");
  if (type == "non_interacting") {
    const MarkovKernel kernel = kernel_from_json(field(j, "kernel"), src ? &*src : nullptr, dst ? &*dst : nullptr);
    return non_interacting(kernel, matrices_from_json(field(j, "kraus"), "kraus"));
  }
  if (type == "coeff_kernel") {
    const std::vector<CMatrix> basis = matrices_from_json(field(j, "basis"), "basis");
    const json& entries = field(j, "k");
    if (!entries.is_array()) parse_error("k must be an array of {m, n, K}");
    std::size_t max_m = 0;
    std::size_t max_n = 0;
    for (const json& e : entries) {
      max_m = std::max(max_m, get_as<std::size_t>(field(e, "m"), "k m"));
      max_n = std::max(max_n, get_as<std::size_t>(field(e, "n"), "k n"));
    }
    const ClassicalSpace s = src ? *src : ClassicalSpace::counting(max_n + 1);
    const ClassicalSpace d = dst ? *dst : ClassicalSpace::counting(max_m + 1);
    CoefficientKernel k(s, d, static_cast<int>(basis.size()));
    for (const json& e : entries) {
      k.set(e.at("m").get<std::size_t>(), e.at("n").get<std::size_t>(), matrix_from_json(field(e, "K")));
    }
    return from_coeff_kernel(basis, k);
  }
  parse_error("unknown channel type \"" + type + "\"");
}

json to_json(const LoccProtocol& protocol) {
  json rounds = json::array();
  for (const LoccRound& round : protocol.rounds()) {
    json instrument = json::object();
    for (const auto& [history, elements] : round.instrument) instrument[history_key(history)] = matrices_to_json(elements);
    rounds.push_back(json{{"side", round.side}, {"outcomes", round.outcomes}, {"instrument", instrument}});
  }
  return json{{"dims", {protocol.d1(), protocol.d2()}}, {"rounds", rounds}};
}

LoccProtocol protocol_from_json(const json& j) {
  const auto dims = get_as<std::vector<int>>(field(j, "dims"), "protocol dims");
  if (dims.size() != 2) parse_error("protocol dims must be [d1, d2]");
  const json& rounds_json = field(j, "rounds");
  if (!rounds_json.is_array()) parse_error("rounds must be an array");
  std::vector<LoccRound> rounds;
  for (std::size_t r = 0; r < rounds_json.size(); ++r) {
    const json& rj = rounds_json[r];
    LoccRound round;
    round.side = rj.contains("side") ? get_as<int>(rj.at("side"), "round side") : default_side(r);
    round.outcomes = get_as<int>(field(rj, "outcomes"), "round outcomes");
    const json& inst = field(rj, "instrument");
    if (!inst.is_object()) parse_error("instrument must map history strings to matrix lists");
    for (const auto& [key, value] : inst.items()) {
      round.instrument.emplace(parse_history_key(key), matrices_from_json(value, "instrument"));
    }
    rounds.push_back(std::move(round));
  }
  return LoccProtocol(dims[0], dims[1], std::move(rounds));
}

json to_json(const MonotonicityReport& report) {
  return json{{"I_before", report.i_before},
              {"I_after", report.i_after},
              {"violation", report.violation},
              {"bound_2S", report.bound_2s}};
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace hybridiq::io
