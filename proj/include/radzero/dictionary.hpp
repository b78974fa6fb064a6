#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace radzero {

using RadicalId = std::string;
using CharacterLabel = std::string;
using StructureKind = std::string;

/// Structure kinds the toolkit knows about. Only `Single` is special-cased;
/// the rest are identifiers declared by dictionary and layout files.
inline constexpr std::string_view kSingle = "Single";
inline constexpr std::size_t kMaxStructureKinds = 14;

struct Radical {
    RadicalId id;
    std::string display_name;

    friend bool operator==(const Radical&, const Radical&) = default;
};

struct StructureDecl {
    StructureKind kind;
    std::size_t slot_count = 0;

    friend bool operator==(const StructureDecl&, const StructureDecl&) = default;
};

/// One character category. `radicals[i]` occupies slot i of `structure`.
struct CharacterEntry {
    CharacterLabel character;
    StructureKind structure;
    std::vector<RadicalId> radicals;

    friend bool operator==(const CharacterEntry&, const CharacterEntry&) = default;
};

struct Violation {
    enum class Kind {
        UndeclaredRadical,
        UndeclaredStructure,
        DuplicateRadical,
        DuplicateStructure,
        BadStructureArity,
        TooManyStructures,
        SlotCountMismatch,
        SingleLabelMismatch,
        EmptyEntry,
        DuplicateEntry,
        TooManyRadicals,
    };
    Kind kind;
    std::optional<std::size_t> entry;  // index into entries, when applicable
    std::string message;
};

/// Character decomposition dictionary. Immutable once constructed; the
/// lookup indexes are built by the constructor.
class Dictionary {
public:
    Dictionary() = default;
    Dictionary(std::vector<Radical> radicals, std::vector<StructureDecl> structures,
               std::vector<CharacterEntry> entries);

    const std::vector<Radical>& radicals() const noexcept { return radicals_; }
    const std::vector<StructureDecl>& structures() const noexcept { return structures_; }
    const std::vector<CharacterEntry>& entries() const noexcept { return entries_; }

    const CharacterEntry* find(std::string_view character) const;
    const StructureDecl* find_structure(std::string_view kind) const;
    bool has_radical(std::string_view id) const;

    /// Characters (in entry order, without repeats) whose decomposition uses `radical`.
    std::vector<CharacterLabel> characters_with_radical(std::string_view radical) const;

    /// Every character whose slot-ordered radicals and structure match exactly.
    std::vector<CharacterLabel> search(const std::vector<RadicalId>& radicals,
                                       std::string_view structure) const;

    /// Character labels in file order without repeats.
    std::vector<CharacterLabel> categories() const;

    friend bool operator==(const Dictionary& a, const Dictionary& b) {
        return a.radicals_ == b.radicals_ && a.structures_ == b.structures_ &&
               a.entries_ == b.entries_;
    }

private:
    std::vector<Radical> radicals_;
    std::vector<StructureDecl> structures_;
    std::vector<CharacterEntry> entries_;

    std::map<std::string, std::vector<std::size_t>, std::less<>> by_decomposition_;
    std::map<std::string, std::size_t, std::less<>> by_character_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_radical_;
};

/// Parses the line-oriented dictionary format without validating it.
Dictionary parse_dictionary(std::istream& in, const std::string& source = "<stream>");

/// Parses and validates; throws ParseError or ValidationError.
Dictionary load_dictionary(const std::filesystem::path& path);

void save_dictionary(const Dictionary& dict, std::ostream& out);
void save_dictionary(const Dictionary& dict, const std::filesystem::path& path);

std::vector<Violation> validate(const Dictionary& dict);

/// Radical count k of `character`. Throws UnknownCharacter.
std::size_t get_num(const Dictionary& dict, std::string_view character);

/// All matches in dictionary order; empty when nothing matches.
inline std::vector<CharacterLabel> search_dic(const Dictionary& dict,
                                              const std::vector<RadicalId>& radicals,
                                              std::string_view structure) {
    return dict.search(radicals, structure);
}

}  // namespace radzero
