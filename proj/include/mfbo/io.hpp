#pragma once

#include <string>
#include <vector>

#include "mfbo/experiments.hpp"
#include "mfbo/metrics.hpp"
#include "mfbo/observation.hpp"

namespace mfbo::io {

/// Round-trippable decimal rendering (17 significant digits).
std::string format_double(double v);

/// Trace CSV schema: step,fidelity,cost,cumulative_cost,y,best_hf,x0..x{d-1}
void write_trace_csv(const std::string& path, const CampaignTrace& trace);

struct TraceRow {
    std::size_t step = 0;
    double fidelity = 0.0;
    double cost = 0.0;
    double cumulative_cost = 0.0;
    double y = 0.0;
    double best_hf = 0.0;
    std::vector<double> x;
};
std::vector<TraceRow> read_trace_csv(const std::string& path);

/// Aligned-regret CSV schema:
/// step,sf_cost,regret_sf_mean,regret_sf_std,regret_mf_mean,regret_mf_std
/// Either trace group may be empty; its columns are left blank.
void write_regret_csv(const std::string& path, const std::vector<double>& sf_costs,
                      const std::vector<RegretTrace>& sf, const std::vector<RegretTrace>& mf);

struct RegretRow {
    std::size_t step = 0;
    double sf_cost = 0.0;
    bool has_sf = false;
    double sf_mean = 0.0, sf_std = 0.0;
    bool has_mf = false;
    double mf_mean = 0.0, mf_std = 0.0;
};
std::vector<RegretRow> read_regret_csv(const std::string& path);

/// Heatmap CSV schema (long format):
/// rho,alpha,r_squared,acqf_family,delta_mean,delta_std,n_seeds,failed,error
void write_heatmap_csv(const std::string& path, const SweepGrid& grid);
std::vector<SweepCell> read_heatmap_csv(const std::string& path);

/// Two-column pairs CSV with header "lf,hf" (any column order with those
/// names is accepted).
void read_pairs_csv(const std::string& path, Vector& lf, Vector& hf);

std::string family_name(AcquisitionSpec::Family family);
AcquisitionSpec::Family family_from_name(const std::string& name);

} // namespace mfbo::io
