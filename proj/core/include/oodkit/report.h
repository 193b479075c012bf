/* Copyright 2026 The oodkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef OODKIT_REPORT_H_
#define OODKIT_REPORT_H_

#include <string>
#include <string_view>

#include "oodkit/harness.h"

namespace oodkit {

enum class ReportFormat { kJson, kMarkdown, kCsv };

// "json", "md" / "markdown", "csv".
ReportFormat ParseReportFormat(std::string_view name);

// JSON is lossless (ReportFromJson inverts it exactly). Markdown renders one
// table per task: rows are (split, seed) runs plus a mean +- std row when
// there is more than one, columns are Acc% then one column per detector;
// values are percent with two decimals and failed cells render as an
// em-dash with a numbered footnote. CSV is long-form, one metric per line.
std::string EmitReport(const EvalReport& report, ReportFormat format);

EvalReport ReportFromJson(std::string_view json_text);

// Display label for a detector column (e.g. "maha" -> "Maha").
std::string DetectorDisplayName(std::string_view detector);

}  // namespace oodkit

#endif  // OODKIT_REPORT_H_
