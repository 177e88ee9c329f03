#pragma once

#include <string>
#include <string_view>

namespace mmwia {

enum class ProtocolName { Baseline, FastRA, FastCS, OmniRX };

std::string_view to_string(ProtocolName p);
ProtocolName parse_protocol_name(std::string_view s);

/// Beam-direction counts swept by BS and user in each initial access phase.
struct Protocol {
    ProtocolName name = ProtocolName::Baseline;
    int m_cs = 1;  ///< BS directions during cell search
    int n_cs = 1;  ///< user directions during cell search
    int m_ra = 1;  ///< BS directions during random access
    int n_ra = 1;  ///< user directions during random access
    int m_cs_coarse = 4;
    int m_bs = 1;  ///< BS beam count M used for data
    int n_user = 1;  ///< user beam count N

    /// Builds the named protocol for M BS beams and N user beams.
    static Protocol make(ProtocolName name, int m, int n, int m_cs_coarse = 4);

    /// Number of non-overlapping BS sectors seen by a user during CS.
    int k_cs() const noexcept { return m_cs > n_cs ? m_cs : n_cs; }
    /// User beam count in the data phase.
    int n_data() const noexcept { return n_cs > n_ra ? n_cs : n_ra; }
    /// BS sectors covered by the user's data main lobe.
    int q() const noexcept { return k_cs() / n_data(); }

    int cs_symbols() const noexcept { return m_cs * n_cs; }
    int ra_symbols() const noexcept { return m_ra * n_ra; }

    /// Throws ConfigError if the derived quantities are not positive integers
    /// or the CS sector partitions do not nest.
    void validate() const;
};

}  // namespace mmwia
