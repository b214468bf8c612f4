#pragma once

#include <string>

#include "coactiv/model.hpp"

namespace coactiv {

// Parses the guarded-command model language:
//
//   const <name> = <int|rational>;
//   module <name>
//     <var> : [<lo>..<hi>] init <v>;
//     [<action>] <bexpr> -> <p>:(<x>'=<iexpr>)&(...) + ... ;
//   endmodule
//   label "<name>" = <bexpr>;
//   rewards
//     [<action>] <bexpr> : <rexpr>;
//   endrewards
//
// Constants must be declared before use and are substituted during
// parsing; the returned model is fully resolved. Declarations that
// reference variables (commands, labels, rewards) must come after the
// variable declarations they use.
FactoredMdp parse_model(const std::string& text);

FactoredMdp parse_model_file(const std::string& path);

// Parses a boolean predicate over the model's variables (used for
// dataset labeling). Throws ParseError on unknown names.
Expr parse_predicate(const std::string& text, const FactoredMdp& m);

}  // namespace coactiv
