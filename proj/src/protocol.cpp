#include "mmwia/protocol.hpp"

#include <string>

#include "mmwia/errors.hpp"

namespace mmwia {

std::string_view to_string(ProtocolName p) {
    switch (p) {
        case ProtocolName::Baseline: return "baseline";
        case ProtocolName::FastRA: return "fast_ra";
        case ProtocolName::FastCS: return "fast_cs";
        case ProtocolName::OmniRX: return "omni_rx";
    }
    return "?";
}

ProtocolName parse_protocol_name(std::string_view s) {
    if (s == "baseline") return ProtocolName::Baseline;
    if (s == "fast_ra" || s == "fastra") return ProtocolName::FastRA;
    if (s == "fast_cs" || s == "fastcs") return ProtocolName::FastCS;
    if (s == "omni_rx" || s == "omnirx") return ProtocolName::OmniRX;
    throw ConfigError("unknown protocol '" + std::string(s) + "'", "protocol");
}

Protocol Protocol::make(ProtocolName name, int m, int n, int m_cs_coarse) {
    Protocol p;
    p.name = name;
    p.m_cs_coarse = m_cs_coarse;
    p.m_bs = m;
    p.n_user = n;
    switch (name) {
        case ProtocolName::Baseline: p.m_cs = m, p.n_cs = n, p.m_ra = m, p.n_ra = 1; break;
        case ProtocolName::FastRA: p.m_cs = m, p.n_cs = n, p.m_ra = 1, p.n_ra = 1; break;
        case ProtocolName::FastCS: p.m_cs = m_cs_coarse, p.n_cs = n, p.m_ra = m, p.n_ra = 1; break;
        case ProtocolName::OmniRX: p.m_cs = m, p.n_cs = 1, p.m_ra = 1, p.n_ra = n; break;
    }
    p.validate();
    return p;
}

void Protocol::validate() const {
    auto fail = [](const std::string& msg, const char* key) { throw ConfigError(msg, key); };
    if (m_bs < 1 || n_user < 1) fail("beam counts must be >= 1", "m_antennas");
    if (m_bs % n_user != 0) fail("M/N must be a positive integer", "m_antennas");
    if (m_cs < 1 || n_cs < 1 || m_ra < 1 || n_ra < 1) fail("phase beam counts must be >= 1", "protocol");
    if (name == ProtocolName::FastCS && (m_cs_coarse < n_user || m_cs_coarse > m_bs))
        fail("fast CS requires N <= m_cs_coarse <= M", "m_cs_coarse");
    const int lo = m_cs < n_cs ? m_cs : n_cs;
    if (k_cs() % lo != 0) fail("CS beam counts must nest (max divisible by min)", "protocol");
    if (k_cs() % n_data() != 0) fail("q = K_cs / N_data must be a positive integer", "protocol");
}

}  // namespace mmwia
