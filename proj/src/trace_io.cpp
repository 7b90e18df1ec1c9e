#include "authalic/trace_io.hpp"

#include <cmath>
#include <iomanip>

#include <json.hpp>

namespace authalic {

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

void write_aem_trace_csv(std::ostream& out, const AemResult& result) {
  out << "iteration,energy,grad_norm,alpha,beta,descent_ratio,step_rule,backtracks,restarted,"
         "sufficient_decrease,curvature,clamped_faces,foldings\n";
  out << std::setprecision(17);
  for (const AemRecord& r : result.trace) {
    const NcgRecord& s = r.step;
    out << s.iteration << ',' << s.energy << ',' << s.grad_norm << ',' << s.alpha << ',' << s.beta << ','
        << s.descent_ratio << ',' << to_string(s.rule) << ',' << s.backtracks << ',' << s.restarted << ','
        << s.wolfe.sufficient_decrease << ',' << s.wolfe.curvature << ',' << s.clamps << ',' << r.foldings << '\n';
  }
}

void write_aem_trace_jsonl(std::ostream& out, const AemResult& result) {
  for (const AemRecord& r : result.trace) {
    const NcgRecord& s = r.step;
    const nlohmann::json j = {{"iteration", s.iteration},
                              {"energy", number(s.energy)},
                              {"grad_norm", number(s.grad_norm)},
                              {"alpha", s.alpha},
                              {"beta", s.beta},
                              {"descent_ratio", number(s.descent_ratio)},
                              {"step_rule", to_string(s.rule)},
                              {"backtracks", s.backtracks},
                              {"restarted", s.restarted},
                              {"sufficient_decrease", s.wolfe.sufficient_decrease},
                              {"curvature", s.wolfe.curvature},
                              {"clamped_faces", s.clamps},
                              {"foldings", r.foldings}};
    out << j.dump() << '\n';
  }
}

void write_sem_trace_csv(std::ostream& out, const SemResult& result) {
  out << "iteration,stretch_energy,authalic_energy,image_area\n" << std::setprecision(17);
  for (const SemRecord& r : result.trace) {
    out << r.iteration << ',' << r.stretch << ',' << r.authalic << ',' << r.image_area << '\n';
  }
}

void write_sem_trace_jsonl(std::ostream& out, const SemResult& result) {
  for (const SemRecord& r : result.trace) {
    const nlohmann::json j = {{"iteration", r.iteration},
                              {"stretch_energy", number(r.stretch)},
                              {"authalic_energy", number(r.authalic)},
                              {"image_area", number(r.image_area)}};
    out << j.dump() << '\n';
  }
}

void write_registration_trace_csv(std::ostream& out, const std::vector<RegistrationRecord>& trace) {
  out << "iteration,penalized_energy,grad_norm,alpha,beta,landmark_rms\n" << std::setprecision(17);
  for (const RegistrationRecord& r : trace) {
    out << r.step.iteration << ',' << r.step.energy << ',' << r.step.grad_norm << ',' << r.step.alpha << ','
        << r.step.beta << ',' << r.landmark_rms << '\n';
  }
}

}  // namespace authalic
