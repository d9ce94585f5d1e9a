#include "txsc/corpus.hpp"

#include "txsc/errors.hpp"

namespace txsc {

const std::string& corpus_file(const std::string& relpath) {
    const auto& files = corpus_files();
    auto it = files.find(relpath);
    if (it == files.end()) throw TxscError("no bundled corpus file '" + relpath + "'");
    return it->second;
}

}  // namespace txsc
