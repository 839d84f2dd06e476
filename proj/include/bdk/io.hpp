#pragma once

// File formats: model parameter JSON, the defaults file, kernel and
// distribution CSV/JSON, verification reports.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdk/spectral.hpp"
#include "bdk/verify.hpp"

namespace bdk::io {

using nlohmann::json;

/// %.17g; round-trips any double.
std::string format17(double v);

/// {"family": id, "q": number?, "N": integer?, "params": {name: number}}
ModelParams params_from_json(const json& j);
json params_to_json(const ModelParams& p);
ModelParams read_params_file(const std::string& path);

/// $BDK_DEFAULTS if set, otherwise the file shipped with the build.
std::string defaults_path();
/// {"version": 1, "families": [<params object>, ...]}; every family must appear once.
std::map<Family, ModelParams> load_defaults(const std::string& path);
ModelParams defaults_for(Family f);

struct KernelBlock {
    double t = 0;
    Matrix T;  // [y][x]
    Diagnostics diag;
};

struct KernelMeta {
    ModelParams params;
    StateSpace space;
    SpectralOptions options;
    int n_max = 0;
    double spectral_tail_bound = 0;
};

/// Header y,x,t,probability.
void write_kernel_csv(std::ostream& os, const std::vector<KernelBlock>& blocks);
json kernel_json(const KernelMeta& meta, const std::vector<KernelBlock>& blocks);

/// Header x,probability.
void write_distribution_csv(std::ostream& os, const Distribution& d);
Distribution read_distribution_csv(std::istream& is);
Distribution read_distribution_file(const std::string& path);

json report_row(const CheckResult& r);
json report_json(const std::vector<CheckResult>& rows);

}  // namespace bdk::io
