#include "mmwia/system_config.hpp"

#include <cmath>
#include <string>

#include "mmwia/errors.hpp"
#include "mmwia/units.hpp"

namespace mmwia {

SystemConfig SystemConfig::from_db(const DbParams& p) {
    SystemConfig c;
    c.lambda_bs = per_km2_to_per_m2(p.lambda_bs_per_km2);
    c.lambda_u = per_km2_to_per_m2(p.lambda_u_per_km2);
    c.fc_ghz = p.fc_ghz;
    c.bandwidth_hz = p.bandwidth_hz;
    c.p_bs_mw = dbm_to_mw(p.p_bs_dbm);
    c.p_user_mw = dbm_to_mw(p.p_user_dbm);
    c.noise_mw = dbm_to_mw(p.noise_dbm);
    c.alpha_los = p.alpha_los;
    c.alpha_nlos = p.alpha_nlos;
    c.beta = db_to_linear(p.beta_db);
    c.gamma_cs = db_to_linear(p.gamma_cs_db);
    c.gamma_ra = db_to_linear(p.gamma_ra_db);
    c.tau_cs_s = p.tau_cs_s;
    c.tau_ra_s = p.tau_ra_s;
    c.cycle_t_s = p.cycle_t_s;
    c.n_pa = p.n_pa;
    // A front-back ratio of C0 dB enters gamma as the suppression factor 10^(-C0/10).
    c.c0 = db_to_linear(-p.c0_front_back_db);
    c.m_antennas = p.m_antennas;
    c.n_antennas = p.n_antennas;
    return c;
}

namespace {

void require(bool ok, const char* key, const std::string& msg) {
    if (!ok) throw ConfigError(std::string(key) + ": " + msg, key);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void SystemConfig::validate() const {
    require(std::isfinite(lambda_bs) && lambda_bs >= 0.0, "lambda_bs_per_km2", "must be >= 0");
    require(std::isfinite(lambda_u) && lambda_u >= 0.0, "lambda_u_per_km2", "must be >= 0");
    require(finite_positive(bandwidth_hz), "bandwidth_hz", "must be > 0");
    require(finite_positive(p_bs_mw), "p_bs_dbm", "must be finite");
    require(finite_positive(p_user_mw), "p_user_dbm", "must be finite");
    require(finite_positive(noise_mw), "noise_dbm", "must be finite");
    require(finite_positive(alpha_los), "alpha_los", "must be > 0");
    require(finite_positive(alpha_nlos), "alpha_nlos", "must be > 0");
    require(alpha_los <= alpha_nlos, "alpha_los", "must not exceed alpha_nlos");
    // Interference from an unbounded NLOS tier is only finite for alpha > 2.
    require(alpha_nlos > 2.0, "alpha_nlos", "must be > 2");
    require(finite_positive(beta), "beta_db", "must be finite");
    require(std::isfinite(gamma_cs) && gamma_cs >= 0.0, "gamma_cs_db", "must be finite");
    require(std::isfinite(gamma_ra) && gamma_ra >= 0.0, "gamma_ra_db", "must be finite");
    require(finite_positive(tau_cs_s), "tau_cs_s", "must be > 0");
    require(finite_positive(tau_ra_s), "tau_ra_s", "must be > 0");
    require(finite_positive(cycle_t_s), "cycle_t_s", "must be > 0");
    require(n_pa >= 1, "n_pa", "must be >= 1");
    require(finite_positive(c0), "c0_front_back_db", "must be finite");
    require(m_antennas >= 1, "m_antennas", "must be >= 1");
    require(n_antennas >= 1, "n_antennas", "must be >= 1");
    require(m_antennas % n_antennas == 0, "m_antennas", "M/N must be a positive integer");
}

}  // namespace mmwia
