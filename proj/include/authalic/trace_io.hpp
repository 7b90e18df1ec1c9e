#pragma once

#include <ostream>
#include <vector>

#include "authalic/aem.hpp"
#include "authalic/registration.hpp"
#include "authalic/sem.hpp"

namespace authalic {

// One row (CSV) or one object per line (JSON lines) per iteration.
void write_aem_trace_csv(std::ostream& out, const AemResult& result);
void write_aem_trace_jsonl(std::ostream& out, const AemResult& result);
void write_sem_trace_csv(std::ostream& out, const SemResult& result);
void write_sem_trace_jsonl(std::ostream& out, const SemResult& result);
void write_registration_trace_csv(std::ostream& out, const std::vector<RegistrationRecord>& trace);

}  // namespace authalic
