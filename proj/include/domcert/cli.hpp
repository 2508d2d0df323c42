#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "domcert/matrix_core.hpp"
#include "domcert/simulate.hpp"

namespace domcert {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), field_path(path) {}
  std::string field_path;
};

/// Sectioned key-value config ([model] / [task] / [output] / [subsystem.N]),
/// order-preserving so the canonical serialization is stable.
class Config {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  static Config parse(const std::string& text);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  const std::string* find(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  double require_number(const std::string& section, const std::string& key) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  const Section* section(const std::string& name) const;

  /// Replaces the value (or appends the key); the --set override hook.
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Canonical text form; the report echoes exactly this.
  std::string canonical() const;

 private:
  std::vector<std::pair<std::string, Section>> sections_;
};

/// Applies one "section.key=value" override.
void apply_override(Config& config, const std::string& spec);

struct RunOutcome {
  int exit_code = 1;  // 0 ok, 2 infeasible / not found, 1 error
  nlohmann::json report;
};

/// Runs one task (scan | analyze | dissipate | gain | compose | simulate |
/// verify) against a parsed config. Side files named in [output] are written
/// atomically; the report is returned, not written.
RunOutcome run_task(const std::string& task, const Config& config);

/// Plot-data emitters.
/// Eigenvalue locus of the sample matrices: one "re,im" row per eigenvalue.
std::string locus_csv(const std::vector<Eigen::MatrixXd>& samples);
/// Unit-circle slice of the cone {V <= 0} of a 2x2 storage: rows
/// "theta,x,y,V" at the directions where the quadratic form is nonpositive
/// (empty for definite P, the full circle for negative definite P).
std::string cone_region_csv(const SymMatrix& P, int circle_samples = 720);

/// Write-temp-rename file write.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace domcert
