#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "delaylab/dimension.hpp"
#include "delaylab/observables.hpp"
#include "delaylab/prediction.hpp"
#include "delaylab/slices.hpp"

namespace delaylab {

// Malformed input files; message carries the 1-based line number.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits; round-trips doubles exactly.
std::string fmt17(double v);

// Cloud CSV: "# system,<descriptor>,seed,<seed>" then one point per row,
// coordinates first, weight last.
void save_cloud_csv(const PointCloud& cloud, std::ostream& os);
void save_cloud_csv(const PointCloud& cloud, const std::string& path);
PointCloud load_cloud_csv(std::istream& is);
PointCloud load_cloud_csv(const std::string& path);

// Embedded pairs CSV: "# embed,<descriptor>,observable,<base>,k,<k>,n_phase,<N>,seed,<seed>"
// then rows x_1..x_N, u_1..u_k, v_1..v_k, weight.
void save_embedded_csv(const EmbeddedCloud& ec, std::ostream& os);
void save_embedded_csv(const EmbeddedCloud& ec, const std::string& path);
EmbeddedCloud load_embedded_csv(std::istream& is);
EmbeddedCloud load_embedded_csv(const std::string& path);

nlohmann::json observable_to_json(const Observable& h);
Observable observable_from_json(const nlohmann::json& j);

nlohmann::json dimension_to_json(const DimensionEstimate& est);

// Exceedance curve CSV: header row epsilon,fraction,empty_ball_fraction,delta.
void save_curve_csv(const ExceedanceCurve& curve, std::ostream& os);
ExceedanceCurve load_curve_csv(std::istream& is);

nlohmann::json scaling_to_json(const ScalingFit& fit);

// Slice CSV (member coordinates, weight, image coordinates) + JSON sidecar.
void save_slice_csv(const SliceEstimate& slice, std::ostream& os);
nlohmann::json slice_sidecar(const SliceEstimate& slice);

// Two-column plot data (x y per line), 17 significant digits.
void save_plot_data(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& path);

void write_text_file(const std::string& path, const std::string& body);
std::string read_text_file(const std::string& path);

}  // namespace delaylab
