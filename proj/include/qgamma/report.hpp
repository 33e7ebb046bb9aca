#pragma once

#include <string>
#include <vector>

#include "qgamma/certificates.hpp"
#include "qgamma/theorems.hpp"

// Serialization of verification results. Output is deterministic: checks
// are emitted in (q, x, s, c, quantity) order, JSON numbers use the shortest
// round-trip form, CSV numbers use 17 significant digits, and NaN (an unused
// point coordinate) becomes null in JSON and an empty CSV field.
namespace qgamma {

enum class Format { Json, Csv };

Format format_from_string(const std::string& name);

/// A single report renders as a JSON object, several as a JSON array.
/// CSV has one header line followed by the rows of every report.
std::string render(const std::vector<TheoremReport>& reports, Format fmt);
std::string render(const std::vector<CertificateReport>& reports, Format fmt);
std::string render(const std::vector<CMReport>& reports, Format fmt);

std::string render_defaults(const GridSpec& grid, Format fmt);

/// Header shared by every CSV report.
inline constexpr const char* kCsvHeader = "id,q,x,s,c,quantity,value,threshold,pass";

}  // namespace qgamma
