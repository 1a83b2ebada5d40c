#include "gnnmerge/model.hpp"

#include <sstream>

#include "binary_io.hpp"
#include "gnnmerge/errors.hpp"

namespace gnnmerge {

std::string arch_name(Arch a) {
    switch (a) {
        case Arch::Gcn: return "gcn";
        case Arch::Sage: return "sage";
        case Arch::Gin: return "gin";
        case Arch::Gat: return "gat";
    }
    return "?";
}

Arch arch_from_name(const std::string& name) {
    if (name == "gcn") return Arch::Gcn;
    if (name == "sage") return Arch::Sage;
    if (name == "gin") return Arch::Gin;
    if (name == "gat") return Arch::Gat;
    throw ParameterError("unknown architecture '" + name + "' (expected gcn|sage|gin|gat)");
}

std::size_t GnnModel::backbone_parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) {
        for (const auto& w : layer.weights) n += w.size();
        if (layer.gat_attention) n += layer.gat_attention->size();
    }
    return n;
}

namespace {

void validate_layer(const LayerSpec& l, std::size_t index) {
    const std::string where = "layer " + std::to_string(index);
    if (l.gat_attention.has_value() != (l.arch == Arch::Gat)) {
        throw ShapeError(where + ": gat_attention present iff arch is gat");
    }
    switch (l.arch) {
        case Arch::Gcn:
        case Arch::Gat:
            if (l.weights.size() != 1 || l.weights[0].rows() != l.in_dim ||
                l.weights[0].cols() != l.out_dim) {
                throw ShapeError(where + ": expected single " + std::to_string(l.in_dim) + "x" +
                                 std::to_string(l.out_dim) + " weight");
            }
            if (l.arch == Arch::Gat &&
                (l.gat_attention->rows() != 2 * l.out_dim || l.gat_attention->cols() != 1)) {
                throw ShapeError(where + ": gat attention vector must be " +
                                 std::to_string(2 * l.out_dim) + "x1");
            }
            break;
        case Arch::Sage: {
            if (l.out_dim % 2 != 0) {
                throw ShapeError(where + ": sage out_dim must be even, got " +
                                 std::to_string(l.out_dim));
            }
            const std::size_t half = l.out_dim / 2;
            if (l.weights.size() != 2 || l.weights[0].rows() != l.in_dim ||
                l.weights[0].cols() != half || l.weights[1].rows() != l.in_dim ||
                l.weights[1].cols() != half) {
                throw ShapeError(where + ": sage expects two " + std::to_string(l.in_dim) + "x" +
                                 std::to_string(half) + " weights");
            }
            break;
        }
        case Arch::Gin: {
            if (l.weights.empty()) throw ShapeError(where + ": gin needs at least one matrix");
            std::size_t d = l.in_dim;
            for (std::size_t k = 0; k < l.weights.size(); ++k) {
                if (l.weights[k].rows() != d) {
                    throw ShapeError(where + ": gin chain break at matrix " + std::to_string(k));
                }
                d = l.weights[k].cols();
            }
            if (d != l.out_dim) {
                throw ShapeError(where + ": gin chain ends at " + std::to_string(d) +
                                 ", expected " + std::to_string(l.out_dim));
            }
            break;
        }
    }
}

} // namespace

void validate_model(const GnnModel& m) {
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        validate_layer(m.layers[i], i);
        if (i > 0 && m.layers[i].in_dim != m.layers[i - 1].out_dim) {
            throw ShapeError("layer " + std::to_string(i) + " in_dim " +
                             std::to_string(m.layers[i].in_dim) + " does not chain from layer " +
                             std::to_string(i - 1) + " out_dim " +
                             std::to_string(m.layers[i - 1].out_dim));
        }
    }
    if (!m.layers.empty()) {
        for (const auto& [task, head] : m.heads) {
            if (head.rows() != m.layers.back().out_dim) {
                throw ShapeError("head '" + task + "' rows " + std::to_string(head.rows()) +
                                 " do not match final layer out_dim " +
                                 std::to_string(m.layers.back().out_dim));
            }
        }
    }
}

int first_skeleton_mismatch(const GnnModel& a, const GnnModel& b) {
    const std::size_t n = std::max(a.layers.size(), b.layers.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= a.layers.size() || i >= b.layers.size()) return static_cast<int>(i);
        const auto& la = a.layers[i];
        const auto& lb = b.layers[i];
        if (la.arch != lb.arch || la.in_dim != lb.in_dim || la.out_dim != lb.out_dim ||
            la.activation != lb.activation || la.weights.size() != lb.weights.size() ||
            la.gat_attention.has_value() != lb.gat_attention.has_value())
            return static_cast<int>(i);
        for (std::size_t k = 0; k < la.weights.size(); ++k) {
            if (la.weights[k].rows() != lb.weights[k].rows() ||
                la.weights[k].cols() != lb.weights[k].cols())
                return static_cast<int>(i);
        }
    }
    return -1;
}

std::string describe_layer(const GnnModel& m, std::size_t i) {
    if (i >= m.layers.size()) return "absent (model has " + std::to_string(m.layers.size()) + " layers)";
    const auto& l = m.layers[i];
    std::ostringstream os;
    os << arch_name(l.arch) << " " << l.in_dim << "->" << l.out_dim
       << " (k=" << l.num_transforms() << ")";
    return os.str();
}

namespace {

constexpr char kModelMagic[4] = {'G', 'N', 'M', 'M'};
constexpr std::uint32_t kModelVersion = 1;

std::string activation_name(Activation a) {
    return a == Activation::Relu ? "relu" : "identity";
}

Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "identity") return Activation::Identity;
    throw FormatError("unknown activation '" + s + "'");
}

std::string join_dims(const LayerSpec& l) {
    // Chain dims: GIN lists the full inner chain; the rest list in,out.
    std::string out = std::to_string(l.in_dim);
    if (l.arch == Arch::Gin) {
        for (const auto& w : l.weights) out += "," + std::to_string(w.cols());
    } else {
        out += "," + std::to_string(l.out_dim);
    }
    return out;
}

std::vector<std::size_t> parse_dims(const std::string& s) {
    std::vector<std::size_t> dims;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) dims.push_back(std::stoull(item));
    return dims;
}

} // namespace

void save_model(const GnnModel& m, const std::string& path) {
    validate_model(m);
    std::map<std::string, std::string> meta = m.metadata;
    meta["layers"] = std::to_string(m.layers.size());
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        const auto& l = m.layers[i];
        const std::string p = "layer" + std::to_string(i);
        meta[p + ".arch"] = arch_name(l.arch);
        meta[p + ".dims"] = join_dims(l);
        meta[p + ".k"] = std::to_string(l.num_transforms());
        meta[p + ".act"] = activation_name(l.activation);
    }
    for (const auto& [task, head] : m.heads) {
        meta["head." + task] =
            std::to_string(head.rows()) + "," + std::to_string(head.cols());
    }

    std::string blob;
    for (const auto& [k, v] : meta) blob += k + "=" + v + "\n";

    io::Writer w(path);
    w.bytes(kModelMagic, 4);
    w.u32(kModelVersion);
    w.u32(static_cast<std::uint32_t>(blob.size()));
    w.bytes(blob.data(), blob.size());
    for (const auto& layer : m.layers) {
        for (const auto& wm : layer.weights)
            for (double v : wm.values()) w.f64(v);
        if (layer.gat_attention)
            for (double v : layer.gat_attention->values()) w.f64(v);
    }
    for (const auto& [task, head] : m.heads) {
        (void)task; // std::map iterates in sorted task-id order
        for (double v : head.values()) w.f64(v);
    }
    w.finish("model");
}

GnnModel load_model(const std::string& path) {
    io::Reader r(path);
    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kModelMagic, 4) != 0) r.fail("bad magic, expected GNMM");
    const std::uint32_t version = r.u32("version");
    if (version != kModelVersion) {
        r.fail("unsupported model format version " + std::to_string(version));
    }
    const std::uint32_t meta_len = r.u32("metadata length");
    std::string blob(meta_len, '\0');
    r.bytes(blob.data(), meta_len, "metadata blob");

    std::map<std::string, std::string> meta;
    std::stringstream ss(blob);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) r.fail("metadata line without '=': " + line);
        meta[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto require = [&](const std::string& key) -> const std::string& {
        auto it = meta.find(key);
        if (it == meta.end()) r.fail("metadata missing key '" + key + "'");
        return it->second;
    };

    GnnModel m;
    m.metadata = meta;
    std::size_t num_layers = 0;
    try {
        num_layers = std::stoull(require("layers"));
    } catch (const std::exception&) {
        r.fail("metadata 'layers' is not a count");
    }

    for (std::size_t i = 0; i < num_layers; ++i) {
        const std::string p = "layer" + std::to_string(i);
        LayerSpec l;
        try {
            l.arch = arch_from_name(require(p + ".arch"));
        } catch (const ParameterError& e) {
            r.fail(e.what());
        }
        l.activation = activation_from_name(require(p + ".act"));
        const std::vector<std::size_t> dims = parse_dims(require(p + ".dims"));
        if (dims.size() < 2) r.fail(p + ".dims must list at least in,out");
        l.in_dim = dims.front();
        l.out_dim = dims.back();
        switch (l.arch) {
            case Arch::Gcn:
                l.weights.emplace_back(l.in_dim, l.out_dim);
                break;
            case Arch::Gat:
                l.weights.emplace_back(l.in_dim, l.out_dim);
                l.gat_attention = DenseMatrix(2 * l.out_dim, 1);
                break;
            case Arch::Sage:
                if (l.out_dim % 2 != 0) r.fail(p + ": sage out_dim must be even");
                l.weights.emplace_back(l.in_dim, l.out_dim / 2);
                l.weights.emplace_back(l.in_dim, l.out_dim / 2);
                break;
            case Arch::Gin:
                for (std::size_t k = 0; k + 1 < dims.size(); ++k)
                    l.weights.emplace_back(dims[k], dims[k + 1]);
                break;
        }
        m.layers.push_back(std::move(l));
    }

    for (auto& layer : m.layers) {
        for (auto& wm : layer.weights)
            for (double& v : wm.values()) v = r.f64("layer weights");
        if (layer.gat_attention)
            for (double& v : layer.gat_attention->values()) v = r.f64("gat attention");
    }
    for (const auto& [key, value] : meta) {
        if (key.rfind("head.", 0) != 0) continue;
        const std::string task = key.substr(5);
        const std::vector<std::size_t> dims = parse_dims(value);
        if (dims.size() != 2) r.fail("head '" + task + "' dims malformed");
        DenseMatrix head(dims[0], dims[1]);
        for (double& v : head.values()) v = r.f64("head weights");
        m.heads.emplace(task, std::move(head));
    }
    if (!r.at_eof()) r.fail("trailing bytes after weight payload");
    try {
        validate_model(m);
    } catch (const std::exception& e) {
        r.fail(std::string("invariant violation: ") + e.what());
    }
    return m;
}

} // namespace gnnmerge
