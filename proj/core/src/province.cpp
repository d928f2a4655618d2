#include "polarkit/province.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace polarkit {

std::string_view region_name(Region r) {
    switch (r) {
    case Region::central:   return "central";
    case Region::east:      return "east";
    case Region::marmara:   return "marmara";
    case Region::south:     return "south";
    case Region::southeast: return "southeast";
    case Region::west:      return "west";
    }
    return "?";
}

std::optional<Region> region_from_name(std::string_view name) {
    if (name == "central") return Region::central;
    if (name == "east") return Region::east;
    if (name == "marmara") return Region::marmara;
    if (name == "south") return Region::south;
    if (name == "southeast") return Region::southeast;
    if (name == "west") return Region::west;
    return std::nullopt;
}

namespace {

// UTF-8 sequences folded to ASCII. Both cases of each Turkish letter plus the
// circumflexed vowels that appear in some spellings (e.g. Hakkâri).
struct Fold {
    std::string_view seq;
    char ascii;
};

constexpr std::array<Fold, 18> kFolds{{
    {"\xc4\xb1", 'i'}, // ı
    {"\xc4\xb0", 'i'}, // İ
    {"\xc5\x9f", 's'}, // ş
    {"\xc5\x9e", 's'}, // Ş
    {"\xc4\x9f", 'g'}, // ğ
    {"\xc4\x9e", 'g'}, // Ğ
    {"\xc3\xbc", 'u'}, // ü
    {"\xc3\x9c", 'u'}, // Ü
    {"\xc3\xb6", 'o'}, // ö
    {"\xc3\x96", 'o'}, // Ö
    {"\xc3\xa7", 'c'}, // ç
    {"\xc3\x87", 'c'}, // Ç
    {"\xc3\xa2", 'a'}, // â
    {"\xc3\x82", 'a'}, // Â
    {"\xc3\xae", 'i'}, // î
    {"\xc3\x8e", 'i'}, // Î
    {"\xc3\xbb", 'u'}, // û
    {"\xc3\x9b", 'u'}, // Û
}};

} // namespace

std::string canonicalize_province(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        bool folded = false;
        for (const auto& f : kFolds) {
            if (raw.substr(i, f.seq.size()) == f.seq) {
                out.push_back(f.ascii);
                i += f.seq.size();
                folded = true;
                break;
            }
        }
        if (folded) continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
        ++i;
    }
    std::size_t b = 0, e = out.size();
    while (b < e && std::isspace(static_cast<unsigned char>(out[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(out[e - 1]))) --e;
    return out.substr(b, e - b);
}

const std::vector<ProvinceInfo>& province_registry() {
    static const std::vector<ProvinceInfo> table = {
        {"adana", Region::south},
        {"adiyaman", Region::southeast},
        {"afyonkarahisar", Region::west},
        {"agri", Region::east},
        {"aksaray", Region::central},
        {"amasya", Region::central},
        {"ankara", Region::central},
        {"antalya", Region::south},
        {"ardahan", Region::east},
        {"artvin", Region::east},
        {"aydin", Region::west},
        {"balikesir", Region::marmara},
        {"bartin", Region::central},
        {"batman", Region::southeast},
        {"bayburt", Region::east},
        {"bilecik", Region::marmara},
        {"bingol", Region::east},
        {"bitlis", Region::east},
        {"bolu", Region::central},
        {"burdur", Region::south},
        {"bursa", Region::marmara},
        {"canakkale", Region::marmara},
        {"cankiri", Region::central},
        {"corum", Region::central},
        {"denizli", Region::west},
        {"diyarbakir", Region::southeast},
        {"duzce", Region::central},
        {"edirne", Region::marmara},
        {"elazig", Region::east},
        {"erzincan", Region::east},
        {"erzurum", Region::east},
        {"eskisehir", Region::central},
        {"gaziantep", Region::southeast},
        {"giresun", Region::east},
        {"gumushane", Region::east},
        {"hakkari", Region::east},
        {"hatay", Region::south},
        {"igdir", Region::east},
        {"isparta", Region::south},
        {"istanbul", Region::marmara},
        {"izmir", Region::west},
        {"kahramanmaras", Region::south},
        {"karabuk", Region::central},
        {"karaman", Region::central},
        {"kars", Region::east},
        {"kastamonu", Region::central},
        {"kayseri", Region::central},
        {"kilis", Region::southeast},
        {"kirikkale", Region::central},
        {"kirklareli", Region::marmara},
        {"kirsehir", Region::central},
        {"kocaeli", Region::marmara},
        {"konya", Region::central},
        {"kutahya", Region::west},
        {"malatya", Region::east},
        {"manisa", Region::west},
        {"mardin", Region::southeast},
        {"mersin", Region::south},
        {"mugla", Region::west},
        {"mus", Region::east},
        {"nevsehir", Region::central},
        {"nigde", Region::central},
        {"ordu", Region::east},
        {"osmaniye", Region::south},
        {"rize", Region::east},
        {"sakarya", Region::marmara},
        {"samsun", Region::central},
        {"sanliurfa", Region::southeast},
        {"siirt", Region::southeast},
        {"sinop", Region::central},
        {"sirnak", Region::southeast},
        {"sivas", Region::central},
        {"tekirdag", Region::marmara},
        {"tokat", Region::central},
        {"trabzon", Region::east},
        {"tunceli", Region::east},
        {"usak", Region::west},
        {"van", Region::east},
        {"yalova", Region::marmara},
        {"yozgat", Region::central},
        {"zonguldak", Region::central},
    };
    return table;
}

std::optional<Region> province_region(std::string_view canonical_name) {
    const auto& reg = province_registry();
    auto it = std::lower_bound(reg.begin(), reg.end(), canonical_name,
                               [](const ProvinceInfo& p, std::string_view n) { return p.name < n; });
    if (it != reg.end() && it->name == canonical_name) return it->region;
    return std::nullopt;
}

bool is_known_province(std::string_view canonical_name) {
    return province_region(canonical_name).has_value();
}

} // namespace polarkit
