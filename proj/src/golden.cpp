#include "golden.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace acclab {

const std::map<std::string, std::string>& embedded_golden();

namespace {

std::string override_path(const std::string& file) {
    const char* dir = std::getenv("ACCLAB_DATA_DIR");
    if (!dir || !*dir) return {};
    std::filesystem::path p = std::filesystem::path(dir) / file;
    if (std::filesystem::exists(p)) return p.string();
    return {};
}

} // namespace

std::string golden_text(const std::string& file) {
    std::string path = override_path(file);
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read golden table " + path);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }
    const auto& table = embedded_golden();
    auto it = table.find(file);
    if (it == table.end()) throw std::runtime_error("unknown golden table " + file);
    return it->second;
}

std::string golden_origin(const std::string& file) {
    std::string path = override_path(file);
    return path.empty() ? "embedded:" + file : path;
}

std::vector<std::string> golden_files() {
    std::vector<std::string> out;
    for (const auto& [k, v] : embedded_golden()) out.push_back(k);
    return out;
}

std::vector<TableSection> parse_sections(const std::string& text) {
    std::vector<TableSection> out;
    out.push_back({"", {}});
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() == 1 && tok[0].front() == '[' && tok[0].back() == ']') {
            out.push_back({tok[0].substr(1, tok[0].size() - 2), {}});
            continue;
        }
        out.back().rows.push_back(std::move(tok));
    }
    return out;
}

const TableSection& find_section(const std::vector<TableSection>& sections, const std::string& name) {
    for (const auto& s : sections)
        if (s.name == name) return s;
    throw std::runtime_error("golden table section [" + name + "] not found");
}

} // namespace acclab
