#pragma once

#include <string>

namespace capshare::testing {

// edit-config listing as printed, with the test-option block closing
// edit-config before <config> opens.
inline const std::string kFig7Printed = R"(<?xml version="1.0" encoding="UTF-8"?>
<nc:rpc message-id="urn:uuid:edb2c826-1bb6-4837-b3f3-57524d8d31d3"
xmlns:nc="urn:ietf:params:xml:ns:netconf:base:1.0">
  <nc:edit-config>
    <nc:target>
      <nc:running/>
    </nc:target>
    <nc:test-option>set</nc:test-option>
  </nc:edit-config>
  <nc:config>
    <rRMPolicyRatio xmlns="urn:3gpp:sa5:_3gpp-nr-nrm-rrmpolicy">
      <id>1</id>
      <attributes>
        <rRMPolicyDedicatedRatio>57</rRMPolicyDedicatedRatio>
      </attributes>
    </rRMPolicyRatio>
    <rRMPolicyRatio xmlns="urn:3gpp:sa5:_3gpp-nr-nrm-rrmpolicy">
      <id>2</id>
      <attributes>
        <rRMPolicyDedicatedRatio>42</rRMPolicyDedicatedRatio>
      </attributes>
    </rRMPolicyRatio>
  </nc:config>
</nc:edit-config>
</nc:rpc>
)";

inline std::string erase_line(std::string doc, const std::string &line, bool last) {
    const auto pos = last ? doc.rfind(line) : doc.find(line);
    if (pos != std::string::npos) doc.erase(pos, line.size());
    return doc;
}

// <config> nested inside <edit-config>, the form RFC 6241 defines.
inline std::string fig7_nested() { return erase_line(kFig7Printed, "  </nc:edit-config>\n", false); }

// <config> as a sibling of <edit-config> under <rpc>.
inline std::string fig7_sibling() { return erase_line(kFig7Printed, "</nc:edit-config>\n", true); }

} // namespace capshare::testing
