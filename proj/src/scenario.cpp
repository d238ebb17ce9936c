#include "cpsguard/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "cpsguard/errors.hpp"

namespace cpsguard {
namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::kParseError, what);
}

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    parse_error(std::string("missing field \"") + key + "\"");
  }
  return doc.at(key);
}

Index count_field(const Json& doc, const char* key) {
  const Json& v = field(doc, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    parse_error(std::string("\"") + key + "\" must be a non-negative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

std::vector<double> number_array(const Json& v, const std::string& what) {
  if (!v.is_array()) parse_error(what + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& x : v) {
    if (!x.is_number()) parse_error(what + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Mat row_major(const Json& doc, const char* key, Index rows, Index cols) {
  const std::vector<double> flat = number_array(field(doc, key), key);
  if (static_cast<Index>(flat.size()) != rows * cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(key) + " must have " + std::to_string(rows * cols) +
                    " entries (" + std::to_string(rows) + " x " +
                    std::to_string(cols) + ")");
  }
  Mat out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      out(i, j) = flat[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return out;
}

Vec vector_of(const Json& v, const std::string& what) {
  const std::vector<double> flat = number_array(v, what);
  return Eigen::Map<const Vec>(flat.data(), static_cast<Index>(flat.size()));
}

Json flat_row_major(const Mat& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

Json array_of(const Vec& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

double round_sig(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

void round_in_place(Json& j) {
  if (j.is_number_float()) {
    j = round_sig(j.get<double>());
  } else if (j.is_array() || j.is_object()) {
    for (Json& child : j) round_in_place(child);
  }
}

}  // namespace

Scenario parse_scenario(const Json& doc, const Tol& tol,
                        bool check_assumptions) {
  const Index n = count_field(doc, "n");
  const Index p = count_field(doc, "p");
  const Index s = count_field(doc, "s");
  const Index q = count_field(doc, "q");
  if (n == 0 || p == 0 || s == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "n, p and s must be positive");
  }
  LtiSystem sys(row_major(doc, "A", n, n), row_major(doc, "B", n, s),
                row_major(doc, "C", p, n), row_major(doc, "D", p, s));
  if (check_assumptions) require_valid(sys, tol);

  Scenario out{std::move(sys), SideInformation(row_major(doc, "Omega", q, n), tol),
               std::nullopt, std::nullopt};
  if (doc.contains("x0")) {
    Vec x0 = vector_of(doc.at("x0"), "x0");
    if (x0.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "x0 must have n entries");
    }
    out.x0 = std::move(x0);
  }
  if (doc.contains("attack")) {
    AttackSequence attack = parse_attack(doc.at("attack"));
    if (attack.channels() != s) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "attack frames must have s entries");
    }
    out.attack = std::move(attack);
  }
  return out;
}

Scenario load_scenario(const std::filesystem::path& path, const Tol& tol,
                       bool check_assumptions) {
  return parse_scenario(parse_file(path), tol, check_assumptions);
}

Json scenario_to_json(const Scenario& sc) {
  const LtiSystem& sys = sc.system;
  Json out = {{"n", sys.n()},
              {"p", sys.p()},
              {"s", sys.s()},
              {"q", sc.side.q()},
              {"A", flat_row_major(sys.a())},
              {"B", flat_row_major(sys.b())},
              {"C", flat_row_major(sys.c())},
              {"D", flat_row_major(sys.d())},
              {"Omega", flat_row_major(sc.side.omega())}};
  if (sc.x0) out["x0"] = array_of(*sc.x0);
  if (sc.attack) out["attack"] = attack_to_json(*sc.attack);
  return out;
}

AttackSequence parse_attack(const Json& doc) {
  const Index t = count_field(doc, "T");
  const Json& frames = field(doc, "frames");
  if (!frames.is_array() || static_cast<Index>(frames.size()) != t + 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "\"frames\" must hold T+1 frames");
  }
  Mat out;
  for (Index k = 0; k <= t; ++k) {
    const Vec frame = vector_of(frames[static_cast<std::size_t>(k)], "frame");
    if (k == 0) out.resize(frame.size(), t + 1);
    if (frame.size() != out.rows() || frame.size() == 0) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "all frames must have the same positive length");
    }
    out.col(k) = frame;
  }
  return AttackSequence(std::move(out));
}

AttackSequence load_attack(const std::filesystem::path& path) {
  return parse_attack(parse_file(path));
}

Json attack_to_json(const AttackSequence& attack) {
  Json frames = Json::array();
  for (Index k = 0; k <= attack.horizon(); ++k) {
    frames.push_back(array_of(attack.frame(k)));
  }
  return {{"T", attack.horizon()}, {"frames", std::move(frames)}};
}

MeasurementLog read_log(std::istream& in) {
  MeasurementLog log;
  std::vector<Vec> samples;
  bool have_header = false;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const Json::exception& e) {
      parse_error("log line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      log.y_omega = vector_of(field(rec, "y_omega"), "y_omega");
      have_header = true;
      continue;
    }
    const Index k = count_field(rec, "k");
    if (k != static_cast<Index>(samples.size())) {
      parse_error("log records must be contiguous from k = 0 (line " +
                  std::to_string(line_no) + ")");
    }
    Vec y = vector_of(field(rec, "y"), "y");
    if (!samples.empty() && y.size() != samples.front().size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "all output samples must have the same length");
    }
    samples.push_back(std::move(y));
  }
  if (!have_header) parse_error("log is missing the {\"y_omega\"} header");
  if (samples.empty()) parse_error("log holds no output samples");
  log.outputs.resize(samples.front().size(), static_cast<Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    log.outputs.col(static_cast<Index>(k)) = samples[k];
  }
  return log;
}

void write_log(std::ostream& out, const Trajectory& trajectory) {
  Json header = {{"y_omega", array_of(trajectory.side_value)}};
  out << header.dump() << '\n';
  for (Index k = 0; k < trajectory.outputs.cols(); ++k) {
    Json rec = {{"k", k}, {"y", array_of(trajectory.outputs.col(k))}};
    out << rec.dump() << '\n';
  }
}

void write_trace(std::ostream& out, const DetectionTrace& trace) {
  for (const EpochRecord& e : trace.epochs) {
    Json rec = {{"k", e.k},
                {"decision", std::string(to_string(e.decision))},
                {"residual", round_sig(e.residual)}};
    out << rec.dump() << '\n';
  }
}

void write_trace_csv(std::ostream& out, const DetectionTrace& trace) {
  out << "k,decision,residual\n";
  char buf[32];
  for (const EpochRecord& e : trace.epochs) {
    std::snprintf(buf, sizeof buf, "%.12g", e.residual);
    out << e.k << ',' << (e.decision == Decision::kAttack ? 1 : 0) << ','
        << buf << '\n';
  }
}

Json certificate_to_json(const UndetectabilityCertificate& cert) {
  Json out = {{"undetectable", cert.undetectable},
              {"residual", cert.residual},
              {"threshold", cert.threshold},
              {"theta_in_null_omega", cert.theta_in_null_omega},
              {"theta_in_v", cert.theta_in_v},
              {"feasible_dim", cert.feasible_dim}};
  out["induced_state"] =
      cert.induced_state ? array_of(*cert.induced_state) : Json(nullptr);
  return out;
}

Json verdict_to_json(const ExtensionVerdict& verdict) {
  return {{"extensible_forever", verdict.extensible_forever},
          {"test_vector", array_of(verdict.test_vector)},
          {"membership_residual", verdict.membership_residual},
          {"threshold", verdict.threshold}};
}

Json mode_to_json(const ZeroDynamicsMode& mode) {
  Json channels = Json::array();
  for (Index c : mode.channels) channels.push_back(c);
  Json out = {{"lambda_re", mode.lambda.real()},
              {"lambda_im", mode.lambda.imag()},
              {"g_re", array_of(mode.g.real())},
              {"theta_re", array_of(mode.theta.real())},
              {"pencil_residual", mode.pencil_residual},
              {"channels", std::move(channels)}};
  if (!mode.is_real()) {
    out["g_im"] = array_of(mode.g.imag());
    out["theta_im"] = array_of(mode.theta.imag());
  }
  return out;
}

Json class_to_json(const AttackClass& cls) {
  return {{"undetectable_under_omega", cls.undetectable_under_omega},
          {"undetectable_under_zero_omega", cls.undetectable_under_zero_omega},
          {"zero_state_inducing", cls.zero_state_inducing},
          {"zero_dynamics_form", cls.zero_dynamics_form},
          {"frame_shape", std::string(to_string(cls.shape.shape))}};
}

std::string format_report(const Json& report) {
  Json copy = report;
  round_in_place(copy);
  return copy.dump(2);
}

}  // namespace cpsguard
