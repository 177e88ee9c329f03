#pragma once

namespace mmwia {

/// Scalar system parameters. All quantities are stored in linear units;
/// dB values are converted once, at ingestion (see `SystemConfig::from_db`).
struct SystemConfig {
    double lambda_bs = 0.0;     ///< BS density, per m^2
    double lambda_u = 0.0;      ///< user density, per m^2
    double fc_ghz = 28.0;       ///< carrier frequency, informational only
    double bandwidth_hz = 100e6;
    double p_bs_mw = 0.0;
    double p_user_mw = 0.0;
    double noise_mw = 0.0;
    double alpha_los = 2.0;
    double alpha_nlos = 4.0;
    double beta = 0.0;          ///< path loss at 1 m
    double gamma_cs = 0.0;      ///< CS detection threshold
    double gamma_ra = 0.0;      ///< RA preamble detection threshold
    double tau_cs_s = 14.3e-6;
    double tau_ra_s = 14.3e-6;
    double cycle_t_s = 20e-3;
    int n_pa = 64;
    double c0 = 0.1;            ///< user back-lobe suppression factor inside gamma
    int m_antennas = 8;
    int n_antennas = 4;

    /// Parameters as they appear in configuration files (dB / per km^2).
    struct DbParams {
        double lambda_bs_per_km2 = 100.0;
        double lambda_u_per_km2 = 1000.0;
        double fc_ghz = 28.0;
        double bandwidth_hz = 100e6;
        double p_bs_dbm = 30.0;
        double p_user_dbm = 23.0;
        double noise_dbm = -94.0;
        double alpha_los = 2.0;
        double alpha_nlos = 4.0;
        double beta_db = 61.4;
        double gamma_cs_db = -4.0;
        double gamma_ra_db = -4.0;
        double tau_cs_s = 14.3e-6;
        double tau_ra_s = 14.3e-6;
        double cycle_t_s = 20e-3;
        int n_pa = 64;
        double c0_front_back_db = 10.0;
        int m_antennas = 8;
        int n_antennas = 4;
    };

    static SystemConfig from_db(const DbParams& p);

    /// Default deployment: 100 BS/km^2, 1000 users/km^2, 28 GHz, 100 MHz, ...
    static SystemConfig defaults() { return from_db(DbParams{}); }

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;

    /// Duration of the CS + RA phases for the given beam counts.
    double ia_duration_s(int m_cs, int n_cs, int m_ra, int n_ra) const {
        return m_cs * n_cs * tau_cs_s + m_ra * n_ra * tau_ra_s;
    }
};

}  // namespace mmwia
