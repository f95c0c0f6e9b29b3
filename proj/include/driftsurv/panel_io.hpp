#pragma once

#include <filesystem>
#include <iosfwd>

#include "driftsurv/data_model.hpp"

namespace driftsurv::data {

// Canonical panel file: '|' delimited text, one origination line per loan
// ("O|...") followed by its performance lines ("P|..."), preceded by a
// format line and a provenance line. Missing values are empty fields;
// reals are written with 17 significant digits so a re-read is exact.

void write_panel(std::ostream& out, const LoanPanel& panel);
LoanPanel read_panel(std::istream& in);

void save_panel(const std::filesystem::path& path, const LoanPanel& panel);
LoanPanel load_panel(const std::filesystem::path& path);

}  // namespace driftsurv::data
