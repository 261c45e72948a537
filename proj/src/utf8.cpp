#include "stacksent/utf8.hpp"

namespace stacksent::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

} // namespace

std::u32string decode(std::string_view text)
{
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        int extra = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            extra = 1;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            extra = 2;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            extra = 3;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + static_cast<std::size_t>(extra) >= text.size() && extra > 0) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (int j = 1; j <= extra; ++j) {
            const auto b = static_cast<unsigned char>(text[i + j]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        const bool overlong = (extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
                              (extra == 3 && cp < 0x10000);
        if (!ok || overlong || cp > 0x10FFFF || in(cp, 0xD800, 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(extra) + 1;
    }
    return out;
}

void append(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(std::u32string_view code_points)
{
    std::string out;
    out.reserve(code_points.size());
    for (char32_t cp : code_points) append(out, cp);
    return out;
}

char32_t to_lower(char32_t cp)
{
    if (cp < 0x80) return in(cp, 'A', 'Z') ? cp + 0x20 : cp;
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
    if (in(cp, 0x100, 0x17F)) {
        if (cp == 0x130) return U'i';
        if (cp == 0x178) return 0xFF;
        if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return (cp % 2 == 1) ? cp + 1 : cp;
        if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return (cp % 2 == 0) ? cp + 1 : cp;
        return cp;
    }
    if (in(cp, 0x391, 0x3AB) && cp != 0x3A2) return cp + 0x20;
    if (cp == 0x386) return 0x3AC;
    if (in(cp, 0x388, 0x38A)) return cp + 0x25;
    if (cp == 0x38C) return 0x3CC;
    if (in(cp, 0x38E, 0x38F)) return cp + 0x3F;
    if (in(cp, 0x410, 0x42F)) return cp + 0x20;
    if (in(cp, 0x400, 0x40F)) return cp + 0x50;
    if (in(cp, 0x460, 0x481) || in(cp, 0x48A, 0x4BF) || in(cp, 0x4D0, 0x52F))
        return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x4C0) return 0x4CF;
    if (in(cp, 0x4C1, 0x4CE)) return (cp % 2 == 1) ? cp + 1 : cp;
    if (in(cp, 0x531, 0x556)) return cp + 0x30;
    if (in(cp, 0x1E00, 0x1E95) || in(cp, 0x1EA0, 0x1EFF)) return (cp % 2 == 0) ? cp + 1 : cp;
    if (in(cp, 0xFF21, 0xFF3A)) return cp + 0x20;
    return cp;
}

bool is_alnum(char32_t cp)
{
    if (cp < 0x80) return in(cp, '0', '9') || in(cp, 'a', 'z') || in(cp, 'A', 'Z');
    if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
    if (in(cp, 0xC0, 0xFF)) return cp != 0xD7 && cp != 0xF7;
    if (in(cp, 0x100, 0x2AF)) return true;
    if (in(cp, 0x370, 0x3FF)) {
        return in(cp, 0x370, 0x373) || cp == 0x376 || cp == 0x377 || in(cp, 0x37B, 0x37D) ||
               cp == 0x37F || cp == 0x386 || (in(cp, 0x388, 0x3FF) && cp != 0x3F6);
    }
    if (in(cp, 0x400, 0x481) || in(cp, 0x48A, 0x52F)) return true;
    if (in(cp, 0x531, 0x556) || in(cp, 0x561, 0x587)) return true;
    if (in(cp, 0x5D0, 0x5EA)) return true;
    if (in(cp, 0x620, 0x64A) || in(cp, 0x660, 0x669)) return true;
    if (in(cp, 0x904, 0x939) || in(cp, 0x966, 0x96F)) return true;
    if (in(cp, 0x1E00, 0x1FBC)) return true;
    if (in(cp, 0x3041, 0x3096) || in(cp, 0x30A1, 0x30FA)) return true;
    if (in(cp, 0x3400, 0x4DBF) || in(cp, 0x4E00, 0x9FFF)) return true;
    if (in(cp, 0xAC00, 0xD7A3)) return true;
    if (in(cp, 0xFF10, 0xFF19) || in(cp, 0xFF21, 0xFF3A) || in(cp, 0xFF41, 0xFF5A)) return true;
    return false;
}

bool is_space(char32_t cp)
{
    return cp == 0x20 || in(cp, 0x09, 0x0D) || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
           cp == 0x205F || cp == 0x3000;
}

std::string lowercase(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : decode(text)) append(out, to_lower(cp));
    return out;
}

} // namespace stacksent::utf8
