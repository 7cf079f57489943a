#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "whodge/error.hpp"
#include "whodge/util.hpp"
#include "whodge/verify.hpp"

namespace whodge {

namespace {
std::atomic<bool> g_timing{false};
}

const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::identity: return "identity";
    case CheckKind::inequality: return "inequality";
    case CheckKind::report: return "report";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::not_applicable: return "not_applicable";
  }
  return "?";
}

const char* to_string(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::satisfied: return "satisfied";
    case HypothesisStatus::violated: return "violated";
    case HypothesisStatus::not_applicable: return "not_applicable";
  }
  return "?";
}

const char* to_string(FormVariant v) { return v == FormVariant::closed ? "closed" : "coclosed"; }

void set_record_timing(bool on) { g_timing = on; }
bool record_timing() { return g_timing; }

nlohmann::json json_real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return format_real(v);
}

double CheckRecord::term(const std::string& name) const {
  for (const auto& [k, v] : terms)
    if (k == name) return v;
  throw Error("record " + check_id + " has no term '" + name + "'");
}

nlohmann::json CheckRecord::to_json() const {
  nlohmann::json j;
  j["check_id"] = check_id;
  j["case"] = case_name;
  j["inputs"] = {{"domain", inputs.domain},
                 {"V", inputs.potential},
                 {"p", inputs.p},
                 {"b", to_string(inputs.b)},
                 {"N", json_real(inputs.N)},
                 {"h_param", json_real(inputs.h_param)}};
  j["kind"] = to_string(kind);
  j["lhs"] = json_real(lhs);
  j[kind == CheckKind::inequality ? "rhs_bound" : "rhs"] = json_real(rhs);
  j["abs_err"] = json_real(abs_err);
  j["rel_err"] = json_real(rel_err);
  j["tolerance"] = json_real(tolerance);
  j["pass"] = pass;
  j["outcome"] = to_string(outcome);
  j["hypothesis_status"] = to_string(hypothesis_status);
  j["hypothesis_margin"] = json_real(hypothesis_margin);
  if (witness) j["witness"] = {(*witness)[0], (*witness)[1]};
  j["quad_order"] = quad_order;
  j["mesh_h"] = json_real(mesh_h);
  j["runtime_ms"] = json_real(runtime_ms);
  nlohmann::json t = nlohmann::json::array();
  for (const auto& [k, v] : terms) t.push_back({{"name", k}, {"value", json_real(v)}});
  j["terms"] = t;
  if (!note.empty()) j["note"] = note;
  return j;
}

void finalize_identity(CheckRecord& r, double tol, double scale_floor) {
  r.kind = CheckKind::identity;
  r.tolerance = tol;
  r.abs_err = std::abs(r.lhs - r.rhs);
  const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), scale_floor});
  r.rel_err = scale > 0 ? r.abs_err / scale : 0.0;
  r.pass = std::isfinite(r.rel_err) && r.rel_err <= tol;
  r.outcome = r.pass ? Outcome::pass : Outcome::fail;
}

void finalize_inequality(CheckRecord& r, double abs_tol, double rel_tol) {
  r.kind = CheckKind::inequality;
  r.tolerance = rel_tol;
  r.abs_err = r.lhs - r.rhs;  // signed excess
  r.rel_err = std::isfinite(r.rhs) && r.rhs != 0 ? r.abs_err / std::abs(r.rhs) : 0.0;
  if (!std::isfinite(r.rhs)) r.abs_err = -kInf;
  if (r.hypothesis_status != HypothesisStatus::satisfied) {
    r.pass = false;
    r.outcome = Outcome::not_applicable;
    return;
  }
  r.pass = r.lhs <= r.rhs + abs_tol + rel_tol * std::abs(r.rhs);
  r.outcome = r.pass ? Outcome::pass : Outcome::fail;
}

CheckRecord perturb_rhs_term(const CheckRecord& r, const std::string& term, double rel) {
  CheckRecord out = r;
  const double v = r.term(term);
  out.rhs += rel * v;
  for (auto& [k, x] : out.terms)
    if (k == term) x *= 1.0 + rel;
  out.case_name += " [perturbed " + term + "]";
  finalize_identity(out, r.tolerance);
  return out;
}

std::string csv_header() { return "check_id,p,b,N,h,quad_order,lhs,rhs,rel_err,hypothesis_status,pass,runtime_ms"; }

std::string csv_row(const CheckRecord& r) {
  std::ostringstream os;
  os << r.check_id << ',' << r.inputs.p << ',' << to_string(r.inputs.b) << ',' << format_real(r.inputs.N) << ','
     << format_real(r.mesh_h) << ',' << r.quad_order << ',' << format_real(r.lhs) << ',' << format_real(r.rhs) << ','
     << format_real(r.rel_err) << ',' << to_string(r.hypothesis_status) << ',' << (r.pass ? "true" : "false") << ','
     << format_real(r.runtime_ms);
  return os.str();
}

std::optional<Point> HypothesisReport::witness() const {
  if (boundary_status == HypothesisStatus::violated) return boundary_witness;
  if (interior_status == HypothesisStatus::violated) return interior_witness;
  return std::nullopt;
}

nlohmann::json HypothesisReport::to_json() const {
  auto pt = [](const std::optional<Point>& p) {
    return p ? nlohmann::json{(*p)[0], (*p)[1]} : nlohmann::json(nullptr);
  };
  return {{"status", to_string(status)},
          {"boundary", {{"status", to_string(boundary_status)},
                        {"condition", boundary_condition},
                        {"margin", json_real(boundary_margin)},
                        {"witness", pt(boundary_witness)}}},
          {"interior", {{"status", to_string(interior_status)},
                        {"condition", interior_condition},
                        {"margin", json_real(interior_margin)},
                        {"witness", pt(interior_witness)}}}};
}

CheckRecord guarded(const std::string& check_id, const std::string& case_name, const std::function<CheckRecord()>& f) {
  try {
    CheckRecord r = f();
    if (r.case_name.empty()) r.case_name = case_name;
    return r;
  } catch (const std::exception& e) {
    CheckRecord r;
    r.check_id = check_id;
    r.case_name = case_name;
    r.kind = CheckKind::report;
    r.lhs = r.rhs = r.abs_err = r.rel_err = std::nan("");
    r.pass = false;
    r.outcome = Outcome::fail;
    r.note = std::string("error: ") + e.what();
    return r;
  }
}

std::vector<CheckRecord> run_batch(const std::vector<std::function<CheckRecord()>>& jobs) {
  std::vector<CheckRecord> out(jobs.size());
  const int workers = std::min<int>(thread_count(), static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i]();
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < jobs.size();) {
        try {
          out[i] = jobs[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace whodge
