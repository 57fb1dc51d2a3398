#ifndef ZSO_ZSO_HPP
#define ZSO_ZSO_HPP

#include "answer_parser.hpp"
#include "csv.hpp"
#include "dataset.hpp"
#include "dispatch.hpp"
#include "error.hpp"
#include "fingerprint.hpp"
#include "gateway.hpp"
#include "harness.hpp"
#include "key_value.hpp"
#include "metrics.hpp"
#include "report.hpp"
#include "response.hpp"
#include "response_cache.hpp"
#include "selection.hpp"
#include "serialization.hpp"
#include "types.hpp"

#endif // ZSO_ZSO_HPP
