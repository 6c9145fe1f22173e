#include "slacast/cell_id.hpp"

#include "slacast/error.hpp"

#include <cctype>

namespace slacast {

namespace {

bool valid_site(std::string_view site) {
    return site.size() == 2 && std::isupper(static_cast<unsigned char>(site[0])) &&
           std::isupper(static_cast<unsigned char>(site[1]));
}

}  // namespace

CellId::CellId(std::string_view site, int sector, int carrier)
    : site_(site), sector_(sector), carrier_(carrier) {
    if (!valid_site(site) || sector < 1 || sector > 9 || carrier < 1 || carrier > 9)
        throw DataError("bad-cell-id", "site must be two uppercase letters and sector/carrier digits 1-9");
}

CellId CellId::parse(std::string_view text) {
    if (text.size() != 4 || !valid_site(text.substr(0, 2)) || text[2] < '1' || text[2] > '9' ||
        text[3] < '1' || text[3] > '9')
        throw DataError("bad-cell-id", "expected e.g. GU14, got '" + std::string(text) + "'");
    return CellId(text.substr(0, 2), text[2] - '0', text[3] - '0');
}

std::string CellId::str() const {
    std::string out = site_;
    out += static_cast<char>('0' + sector_);
    out += static_cast<char>('0' + carrier_);
    return out;
}

}  // namespace slacast
