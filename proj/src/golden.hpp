#pragma once

#include <string>
#include <vector>

namespace acclab {

// Golden tables ship under data/golden and are embedded at build time.
// ACCLAB_DATA_DIR, when set, points at a directory whose files take precedence.
std::string golden_text(const std::string& file);
std::string golden_origin(const std::string& file);
std::vector<std::string> golden_files();

struct TableSection {
    std::string name;
    std::vector<std::vector<std::string>> rows;
};

// '#' starts a comment, "[name]" opens a section, other lines split on whitespace.
std::vector<TableSection> parse_sections(const std::string& text);
const TableSection& find_section(const std::vector<TableSection>& sections, const std::string& name);

} // namespace acclab
