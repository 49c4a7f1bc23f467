#include "pairkern/cli/csv_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <string_view>
#include <unordered_map>

namespace pairkern::cli {

namespace {

struct CsvReader {
    std::ifstream in;
    std::string name;
    std::size_t line_no{ 0 };

    explicit CsvReader(const std::filesystem::path &path) :
        in{ path },
        name{ path.string() } {
        if (!in) {
            throw CsvError("cannot open " + name);
        }
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw CsvError(name + ":" + std::to_string(line_no) + ": " + what);
    }

    // Next non-empty line split on commas; false at end of file.
    bool next(std::vector<std::string> &fields) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty()) {
                continue;
            }
            fields.clear();
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                fields.emplace_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
                if (comma == std::string::npos) {
                    break;
                }
                start = comma + 1;
            }
            return true;
        }
        return false;
    }

    double number(std::string_view text) const {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            fail("not a number: '" + std::string(text) + "'");
        }
        return value;
    }
};

}  // namespace

Interactions read_interactions(const std::filesystem::path &path) {
    CsvReader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields != std::vector<std::string>{ "drug_id", "target_id", "label" }) {
        reader.fail("expected header drug_id,target_id,label");
    }
    Interactions rows;
    while (reader.next(fields)) {
        if (fields.size() != 3) {
            reader.fail("expected 3 fields, got " + std::to_string(fields.size()));
        }
        rows.drug_ids.push_back(fields[0]);
        rows.target_ids.push_back(fields[1]);
        rows.labels.push_back(reader.number(fields[2]));
    }
    return rows;
}

SideData read_feature_table(const std::filesystem::path &path) {
    CsvReader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.empty() || fields.front() != "id") {
        reader.fail("expected header starting with 'id'");
    }
    const std::size_t width = fields.size() - 1;
    SideData side;
    side.kind = SideKind::features;
    std::vector<double> values;
    while (reader.next(fields)) {
        if (fields.size() != width + 1) {
            reader.fail("expected " + std::to_string(width + 1) + " fields, got " + std::to_string(fields.size()));
        }
        side.ids.push_back(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            values.push_back(reader.number(fields[c]));
        }
    }
    side.matrix = DenseMatrix(side.ids.size(), width, std::move(values));
    return side;
}

SideData read_kernel_table(const std::filesystem::path &path) {
    CsvReader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() < 2) {
        reader.fail("expected a header row of object ids");
    }
    const std::vector<std::string> column_ids(fields.begin() + 1, fields.end());
    const std::size_t n = column_ids.size();
    SideData side;
    side.kind = SideKind::kernel;
    std::vector<double> values;
    values.reserve(n * n);
    while (reader.next(fields)) {
        if (fields.size() != n + 1) {
            reader.fail("kernel row has " + std::to_string(fields.size() - 1) + " values, expected " + std::to_string(n));
        }
        if (side.ids.size() >= n || fields[0] != column_ids[side.ids.size()]) {
            reader.fail("row id '" + fields[0] + "' does not match the column order");
        }
        side.ids.push_back(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            values.push_back(reader.number(fields[c]));
        }
    }
    if (side.ids.size() != n) {
        throw CsvError(path.string() + ": kernel is not square (" + std::to_string(side.ids.size()) + " rows, " + std::to_string(n) + " columns)");
    }
    side.matrix = DenseMatrix(n, n, std::move(values));
    if (!side.matrix.is_symmetric(1e-12)) {
        throw CsvError(path.string() + ": asymmetric kernel");
    }
    return side;
}

Dataset assemble_dataset(const Interactions &rows, std::shared_ptr<const SideData> drug_side, std::shared_ptr<const SideData> target_side) {
    auto index_of = [](const SideData &side) {
        std::unordered_map<std::string, index_type> index;
        for (std::size_t i = 0; i < side.ids.size(); ++i) {
            if (!index.emplace(side.ids[i], i).second) {
                throw CsvError("duplicate object id '" + side.ids[i] + "'");
            }
        }
        return index;
    };
    const bool shared = drug_side == target_side;
    const auto drug_index = index_of(*drug_side);
    const auto target_index = shared ? drug_index : index_of(*target_side);

    auto resolve = [](const auto &index, const std::string &id, const char *what) {
        const auto it = index.find(id);
        if (it == index.end()) {
            throw CsvError(std::string("unknown ") + what + " id '" + id + "'");
        }
        return it->second;
    };
    std::vector<index_type> first;
    std::vector<index_type> second;
    first.reserve(rows.labels.size());
    second.reserve(rows.labels.size());
    for (std::size_t i = 0; i < rows.labels.size(); ++i) {
        first.push_back(resolve(drug_index, rows.drug_ids[i], "drug"));
        second.push_back(resolve(target_index, rows.target_ids[i], "target"));
    }

    Dataset ds;
    ds.pairs = PairSample(std::move(first), std::move(second), rows.labels, shared);
    ds.drug_count = drug_side->object_count();
    ds.target_count = target_side->object_count();
    ds.drug_side = std::move(drug_side);
    ds.target_side = std::move(target_side);
    return ds;
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return { buf.data(), ptr };
}

namespace {

std::ofstream open_for_write(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::string object_id(const SideData &side, index_type i) {
    return side.ids.empty() ? std::to_string(i) : side.ids[i];
}

}  // namespace

void write_interactions(const std::filesystem::path &path, const Dataset &ds) {
    std::ofstream out = open_for_write(path);
    out << "drug_id,target_id,label\n";
    const auto labels = ds.pairs.labels();
    for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
        const Pair p = ds.pairs.pair(i);
        out << object_id(*ds.drug_side, p.first) << ',' << object_id(*ds.target_side, p.second) << ',' << format_number(labels[i]) << '\n';
    }
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

void write_feature_table(const std::filesystem::path &path, const SideData &side) {
    std::ofstream out = open_for_write(path);
    out << "id";
    for (std::size_t c = 0; c < side.matrix.cols(); ++c) {
        out << ",f" << c;
    }
    out << '\n';
    for (std::size_t r = 0; r < side.matrix.rows(); ++r) {
        out << object_id(side, r);
        for (const double v : side.matrix.row(r)) {
            out << ',' << format_number(v);
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

}  // namespace pairkern::cli
