// Single-threaded reference kernels. Loops follow the model definitions
// directly (sector by sector, pair by pair) with the same summation order as
// the parallel kernels so the outputs compare exactly.

#include <limits>

#include "mmwia/simulator.hpp"

namespace mmwia {

std::vector<UserOutcome> Simulator::run_cell_search_serial(const NetworkRealization& real) const {
    const int k = proto_.k_cs();
    std::vector<UserOutcome> out(real.users.size());
    for (std::size_t u = 0; u < real.users.size(); ++u) {
        UserOutcome& o = out[u];
        for (int j = 0; j < k; ++j) {
            int best = -1;
            double best_z = std::numeric_limits<double>::infinity();
            double best_p = 0.0;
            double total = 0.0;
            for (std::size_t b = 0; b < real.bs.size(); ++b) {
                if (sector_index(real.users[u], real.bs[b], k) != j) continue;
                const double z = real.path_loss(u, b, cfg_);
                const double p = real.fading(Stream::FadingCs, u, b) / z;
                total += p;
                if (z < best_z) {
                    best_z = z;
                    best = static_cast<int>(b);
                    best_p = p;
                }
            }
            if (best < 0) continue;
            const double interference = std::max(0.0, total - best_p);
            if (best_p / (interference + cs_noise_) < cfg_.gamma_cs) continue;
            o.detected_sectors |= std::uint64_t{1} << j;
            if (best_z < o.z0 || (best_z == o.z0 && best < o.serving)) {
                o.z0 = best_z;
                o.serving = best;
            }
        }
        o.cs_success = o.serving >= 0;
    }
    return out;
}

void Simulator::run_random_access_serial(const NetworkRealization& real, std::vector<UserOutcome>& out) const {
    const RandomStream pre(real.seed, Stream::Preamble, real.id.bs_draw, real.id.user_draw);
    for (std::size_t u = 0; u < out.size(); ++u) {
        auto& o = out[u];
        if (!o.cs_success) continue;
        o.preamble = pre.below(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(cfg_.n_pa));
        o.ra_sector = sector_index(real.bs[static_cast<std::size_t>(o.serving)], real.users[u], proto_.m_ra);
    }
    for (std::size_t u = 0; u < out.size(); ++u) {
        if (!out[u].cs_success) continue;
        for (std::size_t v = 0; v < out.size(); ++v) {
            if (v == u || !out[v].cs_success) continue;
            if (out[v].serving == out[u].serving && out[v].preamble == out[u].preamble &&
                out[v].ra_sector == out[u].ra_sector)
                out[u].ra_collision = true;
        }
    }

    const int n_sect = proto_.n_data();
    for (std::size_t u = 0; u < out.size(); ++u) {
        auto& o = out[u];
        if (!o.cs_success) continue;
        const auto s = static_cast<std::size_t>(o.serving);
        double interference = 0.0;
        for (std::size_t v = 0; v < out.size(); ++v) {
            if (v == u || !out[v].cs_success || out[v].preamble != o.preamble) continue;
            if (sector_index(real.bs[s], real.users[v], proto_.m_ra) != o.ra_sector) continue;
            // OmniRX: the BS listens with the beam aligned to u; otherwise v
            // transmits toward its own serving BS.
            const Point& aim = proto_.n_ra > 1 ? real.bs[s] : real.bs[static_cast<std::size_t>(out[v].serving)];
            const Point& from = proto_.n_ra > 1 ? real.users[u] : real.users[v];
            const bool main = sector_index(real.users[v], real.bs[s], n_sect) == sector_index(from, aim, n_sect);
            const double gain = main ? 1.0 : user_n_.side / user_n_.main;
            interference += real.fading(Stream::FadingRa, v, s) * gain / real.path_loss(v, s, cfg_);
        }
        const double signal = real.fading(Stream::FadingRa, u, s) / o.z0;
        o.ra_decode = signal / (interference + ra_noise_) >= cfg_.gamma_ra;
    }
}

void Simulator::run_data_phase_serial(const NetworkRealization& real, std::vector<UserOutcome>& out) const {
    const std::size_t nb = real.bs.size();
    const RandomStream pick(real.seed, Stream::Schedule, real.id.bs_draw, real.id.user_draw);
    std::vector<int> load(nb, 0), beam(nb, -1);
    for (const auto& o : out)
        if (o.connected()) ++load[static_cast<std::size_t>(o.serving)];
    for (std::size_t b = 0; b < nb; ++b) {
        if (load[b] == 0) continue;
        const auto which = pick.below(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(load[b]));
        std::uint32_t seen = 0;
        for (std::size_t u = 0; u < out.size(); ++u) {
            if (!out[u].connected() || out[u].serving != static_cast<int>(b)) continue;
            if (seen++ == which) {
                out[u].scheduled = true;
                beam[b] = sector_index(real.bs[b], real.users[u], proto_.m_bs);
            }
        }
    }

    const int n_sect = proto_.n_data();
    for (std::size_t u = 0; u < out.size(); ++u) {
        auto& o = out[u];
        if (!o.connected()) continue;
        const auto s = static_cast<std::size_t>(o.serving);
        o.sched_share = 1.0 / static_cast<double>(load[s]);
        double interference = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            if (b == s || beam[b] < 0) continue;
            if (sector_index(real.bs[b], real.users[u], proto_.m_bs) != beam[b]) continue;
            const bool main = sector_index(real.users[u], real.bs[b], n_sect) ==
                              sector_index(real.users[u], real.bs[s], n_sect);
            const double gain = main ? 1.0 : user_n_.side / user_n_.main;
            interference += real.fading(Stream::FadingDl, u, b) * gain / real.path_loss(u, b, cfg_);
        }
        o.dl_sinr = real.fading(Stream::FadingDl, u, s) / o.z0 / (interference + dl_noise_);
    }
}

}  // namespace mmwia
