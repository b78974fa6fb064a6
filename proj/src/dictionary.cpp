#include "radzero/dictionary.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "radzero/error.hpp"

namespace radzero {
namespace {

std::string decomposition_key(const std::vector<RadicalId>& radicals, std::string_view structure) {
    std::string key(structure);
    for (const auto& r : radicals) {
        key += '\x1f';
        key += r;
    }
    return key;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

Dictionary::Dictionary(std::vector<Radical> radicals, std::vector<StructureDecl> structures,
                       std::vector<CharacterEntry> entries)
    : radicals_(std::move(radicals)),
      structures_(std::move(structures)),
      entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        by_decomposition_[decomposition_key(e.radicals, e.structure)].push_back(i);
        by_character_.try_emplace(e.character, i);
        std::set<RadicalId> seen;
        for (const auto& r : e.radicals) {
            if (seen.insert(r).second) by_radical_[r].push_back(i);
        }
    }
}

const CharacterEntry* Dictionary::find(std::string_view character) const {
    const auto it = by_character_.find(character);
    return it == by_character_.end() ? nullptr : &entries_[it->second];
}

const StructureDecl* Dictionary::find_structure(std::string_view kind) const {
    const auto it = std::find_if(structures_.begin(), structures_.end(),
                                 [&](const StructureDecl& s) { return s.kind == kind; });
    return it == structures_.end() ? nullptr : &*it;
}

bool Dictionary::has_radical(std::string_view id) const {
    return std::any_of(radicals_.begin(), radicals_.end(),
                       [&](const Radical& r) { return r.id == id; });
}

std::vector<CharacterLabel> Dictionary::characters_with_radical(std::string_view radical) const {
    std::vector<CharacterLabel> out;
    const auto it = by_radical_.find(radical);
    if (it == by_radical_.end()) return out;
    for (auto i : it->second) {
        if (std::find(out.begin(), out.end(), entries_[i].character) == out.end())
            out.push_back(entries_[i].character);
    }
    return out;
}

std::vector<CharacterLabel> Dictionary::search(const std::vector<RadicalId>& radicals,
                                               std::string_view structure) const {
    std::vector<CharacterLabel> out;
    const auto it = by_decomposition_.find(decomposition_key(radicals, structure));
    if (it == by_decomposition_.end()) return out;
    for (auto i : it->second) {
        if (std::find(out.begin(), out.end(), entries_[i].character) == out.end())
            out.push_back(entries_[i].character);
    }
    return out;
}

std::vector<CharacterLabel> Dictionary::categories() const {
    std::vector<CharacterLabel> out;
    std::set<std::string_view> seen;
    for (const auto& e : entries_) {
        if (seen.insert(e.character).second) out.push_back(e.character);
    }
    return out;
}

Dictionary parse_dictionary(std::istream& in, const std::string& source) {
    std::vector<Radical> radicals;
    std::vector<StructureDecl> structures;
    std::vector<CharacterEntry> entries;

    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
        throw ParseError("dictionary", source + ":" + std::to_string(lineno) + ": " + why);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;

        if (line.rfind("!radical", 0) == 0) {
            std::istringstream ss(line.substr(8));
            Radical r;
            if (!(ss >> r.id)) fail("'!radical' needs an id");
            std::getline(ss, r.display_name);
            r.display_name = trim(r.display_name);
            if (r.display_name.empty()) r.display_name = r.id;
            radicals.push_back(std::move(r));
            continue;
        }
        if (line.rfind("!structure", 0) == 0) {
            std::istringstream ss(line.substr(10));
            StructureDecl s;
            long long count = -1;
            if (!(ss >> s.kind >> count) || count < 0) fail("'!structure' needs <kind> <slot_count>");
            std::string rest;
            if (ss >> rest) fail("trailing text after '!structure' declaration");
            s.slot_count = static_cast<std::size_t>(count);
            structures.push_back(std::move(s));
            continue;
        }
        if (line.front() == '!') fail("unknown directive");

        const auto fields = split(line, '\t');
        if (fields.size() != 3) fail("expected character<TAB>structure<TAB>radicals");
        if (fields[0].empty()) fail("empty character label");
        if (fields[1].empty()) fail("empty structure");
        CharacterEntry e{fields[0], fields[1], {}};
        if (!fields[2].empty()) {
            e.radicals = split(fields[2], ',');
            if (std::any_of(e.radicals.begin(), e.radicals.end(),
                            [](const std::string& r) { return r.empty(); }))
                fail("empty radical id in list");
        }
        entries.push_back(std::move(e));
    }
    return Dictionary(std::move(radicals), std::move(structures), std::move(entries));
}

Dictionary load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("dictionary", "cannot open " + path.string());
    Dictionary dict = parse_dictionary(in, path.string());
    const auto violations = validate(dict);
    if (!violations.empty()) {
        std::string msg = path.string() + ": " + violations.front().message;
        if (violations.size() > 1)
            msg += " (and " + std::to_string(violations.size() - 1) + " more)";
        throw ValidationError("dictionary", msg);
    }
    return dict;
}

void save_dictionary(const Dictionary& dict, std::ostream& out) {
    for (const auto& r : dict.radicals()) out << "!radical " << r.id << ' ' << r.display_name << '\n';
    for (const auto& s : dict.structures()) out << "!structure " << s.kind << ' ' << s.slot_count << '\n';
    for (const auto& e : dict.entries()) {
        out << e.character << '\t' << e.structure << '\t';
        for (std::size_t i = 0; i < e.radicals.size(); ++i) out << (i ? "," : "") << e.radicals[i];
        out << '\n';
    }
}

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("dictionary", "cannot write " + path.string());
    save_dictionary(dict, out);
}

std::vector<Violation> validate(const Dictionary& dict) {
    using K = Violation::Kind;
    std::vector<Violation> out;

    std::set<std::string_view> radical_ids;
    for (const auto& r : dict.radicals()) {
        if (!radical_ids.insert(r.id).second)
            out.push_back({K::DuplicateRadical, std::nullopt, "radical '" + r.id + "' declared twice"});
    }

    std::map<std::string_view, std::size_t> arity;
    for (const auto& s : dict.structures()) {
        if (!arity.emplace(s.kind, s.slot_count).second) {
            out.push_back({K::DuplicateStructure, std::nullopt, "structure '" + s.kind + "' declared twice"});
            continue;
        }
        const bool single = s.kind == kSingle;
        if ((single && s.slot_count != 1) || (!single && s.slot_count < 2)) {
            out.push_back({K::BadStructureArity, std::nullopt,
                           "structure '" + s.kind + "' has " + std::to_string(s.slot_count) +
                               " slots (Single needs 1, others at least 2)"});
        }
    }
    if (arity.size() > kMaxStructureKinds) {
        out.push_back({K::TooManyStructures, std::nullopt,
                       std::to_string(arity.size()) + " structure kinds declared, at most " +
                           std::to_string(kMaxStructureKinds) + " allowed"});
    }

    std::set<std::string> triples;
    for (std::size_t i = 0; i < dict.entries().size(); ++i) {
        const auto& e = dict.entries()[i];
        const std::string where = "entry '" + e.character + "' (#" + std::to_string(i) + ")";
        if (e.radicals.empty()) {
            out.push_back({K::EmptyEntry, i, where + " has no radicals"});
        }
        for (const auto& r : e.radicals) {
            if (!radical_ids.count(r))
                out.push_back({K::UndeclaredRadical, i, where + " uses undeclared radical '" + r + "'"});
        }
        const auto a = arity.find(e.structure);
        if (a == arity.end()) {
            out.push_back({K::UndeclaredStructure, i,
                           where + " uses undeclared structure '" + e.structure + "'"});
        } else if (!e.radicals.empty() && a->second != e.radicals.size()) {
            out.push_back({K::SlotCountMismatch, i,
                           where + " has " + std::to_string(e.radicals.size()) + " radicals but '" +
                               e.structure + "' has " + std::to_string(a->second) + " slots"});
        }
        if (e.structure == kSingle && e.radicals.size() == 1 && e.radicals.front() != e.character) {
            out.push_back({K::SingleLabelMismatch, i,
                           where + " is Single but its radical is '" + e.radicals.front() + "'"});
        }
        std::string key = e.character + '\x1e' + decomposition_key(e.radicals, e.structure);
        if (!triples.insert(std::move(key)).second)
            out.push_back({K::DuplicateEntry, i, where + " duplicates an earlier entry"});
    }

    const auto categories = dict.categories().size();
    if (radical_ids.size() > categories && !dict.entries().empty()) {
        out.push_back({K::TooManyRadicals, std::nullopt,
                       std::to_string(radical_ids.size()) + " radical categories exceed " +
                           std::to_string(categories) + " character categories"});
    }
    return out;
}

std::size_t get_num(const Dictionary& dict, std::string_view character) {
    const auto* e = dict.find(character);
    if (!e) throw UnknownCharacter("dictionary", "unknown character '" + std::string(character) + "'");
    return e->radicals.size();
}

}  // namespace radzero
