#pragma once

#include "sirhawkes/cascades.hpp"
#include "sirhawkes/fit.hpp"
#include "sirhawkes/kernels.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sirhawkes {

using Json = nlohmann::ordered_json;

// Numbers are rounded to 9 significant digits on the way out.
[[nodiscard]] Json to_json(const KernelSpec& spec);
[[nodiscard]] KernelSpec kernel_from_json(const Json& j);

// Exp recovery is written with "gamma"; other families with "theta" (+ "c").
[[nodiscard]] Json to_json(const SirSpec& sir);
[[nodiscard]] SirSpec sir_from_json(const Json& j);

[[nodiscard]] Json to_json(const Cascade& cascade);
[[nodiscard]] Cascade cascade_from_json(const Json& j);

[[nodiscard]] Json to_json(const FitResult& fit, const std::string& id);
[[nodiscard]] Json to_json(const SirFitResult& fit);

// One row of the fit summary CSV.
struct FitSummaryRow {
    std::string cascade_id;
    HawkesNParams params;
    double neg_loglik = 0.0;
    double branching_factor = 0.0;
    bool converged = false;
};

[[nodiscard]] FitSummaryRow summary_row(const FitResult& fit, const std::string& id);
void write_fit_summary(std::ostream& out, const std::vector<FitSummaryRow>& rows);
[[nodiscard]] std::vector<FitSummaryRow> read_fit_summary(std::istream& in);

void save_json(const std::filesystem::path& path, const Json& j);
[[nodiscard]] Json load_json(const std::filesystem::path& path);

}  // namespace sirhawkes
