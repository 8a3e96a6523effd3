#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "padfree/adaptivity.hpp"
#include "padfree/pde.hpp"

namespace padfree {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CaseId { converge, burgers_wave, burgers_periodic, kh };

CaseId parse_case_id(const std::string& name);
std::string case_name(CaseId id);

enum class TestFunction { sinusoid, supergaussian };

/// Everything a run needs. Defaults for a case come from defaults_for().
struct RunConfig {
    CaseId case_id = CaseId::converge;
    TestFunction test_function = TestFunction::sinusoid;
    double wavenumber = 2.0;

    std::vector<double> resolutions{0.1};  ///< s values; PDE cases use the first
    double perturbation = 0.5;             ///< eps / s
    std::uint64_t seed = 1;

    int p_init = 6;
    int p_min = kMinOrder;
    int p_max = kMaxOrder;
    bool adaptive = true;
    int uniform_p = 0;  ///< non-zero: fixed order, adaptation off
    double eps_upper = 1e-2;
    double eps_lower = 1e-4;
    int adapt_interval = 1;

    double re = 100.0;
    double sc = 8.0;
    double ma = 0.1;
    double at = 0.2;
    double delta = 0.05;
    PressureGradient pressure = PressureGradient::as_printed;

    double t_end = 1.0;
    double output_interval = 0.1;
    std::vector<double> snapshot_times;  ///< empty: final time only
    std::string out_dir = "out";
    int threads = 1;

    /// Resolved order bounds: a uniform override collapses the range.
    int initial_order() const { return uniform_p != 0 ? uniform_p : p_init; }
    bool adapting() const { return adaptive && uniform_p == 0; }

    AdaptivityConfig adaptivity() const;
    KhParams kh_params() const;

    /// Throws ConfigError naming the first violated precondition.
    void validate() const;

    /// Sets one key from its textual value; throws ConfigError for
    /// unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);

    /// All keys with their resolved values, in a fixed order.
    std::vector<std::pair<std::string, std::string>> to_key_values() const;
};

/// Full-scale defaults for each case.
RunConfig defaults_for(CaseId id);

/// Parses flat key = value text. Lines before any section header apply to
/// every case; [case-name] sections apply only to that case. '#' starts a
/// comment.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::string& path);

}  // namespace padfree
