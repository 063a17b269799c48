#include "wadc/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wadc {

namespace {

using nlohmann::json;

json parse(const std::string& document) {
    json doc = json::parse(document, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
        throw ParseError("model document is not valid JSON");
    return doc;
}

Eigen::MatrixXd read_matrix(const json& doc, const std::string& key, int rows,
                            int cols) {
    if (!doc.contains(key))
        throw ParseError("model document missing field '" + key + "'");
    const json& arr = doc[key];
    if (!arr.is_array() ||
        arr.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw DimensionMismatch("field '" + key + "' must hold " +
                                std::to_string(rows * cols) +
                                " row-major entries");
    Eigen::MatrixXd M(rows, cols);
    std::size_t k = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c, ++k) {
            if (!arr[k].is_number())
                throw NonFiniteEntry("field '" + key +
                                     "' holds a non-numeric entry");
            M(r, c) = arr[k].get<double>();
        }
    }
    if (!M.allFinite())
        throw NonFiniteEntry("field '" + key + "' holds a non-finite entry");
    return M;
}

json write_matrix(const Eigen::MatrixXd& M) {
    json arr = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            arr.push_back(M(r, c));
    return arr;
}

int read_dim(const json& doc, const std::string& key) {
    if (!doc.contains(key) || !doc[key].is_number_integer())
        throw ParseError("model document needs integer field '" + key + "'");
    const int v = doc[key].get<int>();
    if (v < 1)
        throw DimensionMismatch("dimension '" + key + "' must be positive");
    return v;
}

} // namespace

CtStateSpace load_model(const std::string& document) {
    const json doc = parse(document);
    const int n = read_dim(doc, "n");
    const int m = read_dim(doc, "m");
    const int p = read_dim(doc, "p");

    CtStateSpace model;
    model.A = read_matrix(doc, "A", n, n);
    model.B = read_matrix(doc, "B", n, m);
    model.C = read_matrix(doc, "C", p, n);
    model.D = read_matrix(doc, "D", p, m);
    if (doc.contains("labels")) {
        if (!doc["labels"].is_array())
            throw ParseError("'labels' must be an array of strings");
        for (const auto& l : doc["labels"])
            model.labels.push_back(l.get<std::string>());
    }
    model.validate();
    return model;
}

CtStateSpace load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model(ss.str());
}

double document_step(const std::string& document) {
    const json doc = parse(document);
    if (!doc.contains("h"))
        return 0.0;
    if (!doc["h"].is_number() || doc["h"].get<double>() <= 0.0)
        throw ParseError("'h' must be a positive number");
    return doc["h"].get<double>();
}

std::string save_model(const CtStateSpace& model, double h) {
    model.validate();
    json doc;
    doc["n"] = model.order();
    doc["m"] = model.inputs();
    doc["p"] = model.outputs();
    doc["A"] = write_matrix(model.A);
    doc["B"] = write_matrix(model.B);
    doc["C"] = write_matrix(model.C);
    doc["D"] = write_matrix(model.D);
    if (h > 0.0)
        doc["h"] = h;
    if (!model.labels.empty())
        doc["labels"] = model.labels;
    return doc.dump(2);
}

std::string save_certificate(const LmiCertificate& cert) {
    json doc;
    doc["count"] = cert.P_list.size();
    if (!cert.P_list.empty())
        doc["dim"] = cert.P_list.front().rows();
    json plist = json::array();
    for (const auto& P : cert.P_list)
        plist.push_back(write_matrix(P));
    doc["P"] = plist;
    doc["margins"] = write_matrix(cert.margins);
    doc["min_P_eig"] = cert.min_P_eig;
    return doc.dump(2);
}

LmiCertificate load_certificate(const std::string& document) {
    const json doc = parse(document);
    const int count = read_dim(doc, "count");
    const int dim = read_dim(doc, "dim");
    if (!doc.contains("P") || !doc["P"].is_array() ||
        doc["P"].size() != static_cast<std::size_t>(count))
        throw ParseError("certificate document needs a 'P' array per state");

    LmiCertificate cert;
    for (int i = 0; i < count; ++i) {
        json holder;
        holder["M"] = doc["P"][static_cast<std::size_t>(i)];
        cert.P_list.push_back(read_matrix(holder, "M", dim, dim));
    }
    cert.margins = read_matrix(doc, "margins", count, count);
    if (!doc.contains("min_P_eig") || !doc["min_P_eig"].is_number())
        throw ParseError("certificate document needs 'min_P_eig'");
    cert.min_P_eig = doc["min_P_eig"].get<double>();
    return cert;
}

} // namespace wadc
