#pragma once

#include <map>
#include <string>

namespace txsc {

/// Bundled corpus: contracts, scenarios, transform configs and golden files,
/// keyed by path relative to corpus/ (e.g. "contracts/puzzle.txsc").
const std::map<std::string, std::string>& corpus_files();

/// Fetches one bundled file; throws TxscError when absent.
const std::string& corpus_file(const std::string& relpath);

}  // namespace txsc
