// Copyright 2026 The splnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLNOISE_DETAIL_CA_TABLES_HPP
#define SPLNOISE_DETAIL_CA_TABLES_HPP

#include <span>

namespace splnoise::detail {

struct EmbeddedArray {
    int t;
    int k;
    int v;
    int n;
    const char *rows;
};

/// Search results, one row per whitespace-separated digit string.
inline std::span<const EmbeddedArray> embedded_arrays() {
    static const EmbeddedArray arrays[] = {
        {2, 5, 3, 11,
         "20020 12021 22222 02100 21002 10102 01121 00201 22111 11210 "
         "00012"},
        {2, 7, 3, 12,
         "1120220 2222001 0201020 0012200 1101101 2021110 0220102 "
         "2000221 1002012 2112122 1211212 0110011"},
        {2, 9, 3, 13,
         "110002211 202201202 001111210 222112012 210100120 111010102 "
         "000022122 120211121 100120001 021202000 122020220 012220111 "
         "211021021"},
        {2, 10, 3, 14,
         "1120111212 1101201021 2222210121 0000220110 1202102112 "
         "0210121001 0122222222 2201012200 1022021020 2110101120 "
         "1012200201 0121000102 0010012011 2011120012"},
        {2, 20, 3, 15,
         "01220210220001222022 12122202100120022111 "
         "10200020111012202111 01110222112112010020 "
         "01000201001220101021 10111011010210221002 "
         "00101120202021011102 21022020220210110201 "
         "11011111122201112111 10012002212021200220 "
         "22201112020222000120 02002011201102020212 "
         "22220121012000122200 20121202121102101202 "
         "22212100001111211010"},
        {3, 5, 2, 10,
         "10000 11100 00110 11010 11001 10111 01000 00101 00011 01111"},
        {3, 11, 2, 12,
         "01000101101 10011001001 00111100111 00001110000 00010011110 "
         "10100010101 11001000110 11111111100 01110000000 10100101010 "
         "11010110011 01101011011"},
        {3, 12, 2, 15,
         "100100010101 110110101100 101010111011 011000011110 "
         "010000111011 110011010000 011111110111 000110000010 "
         "000101111000 101110000100 111101001011 100001100110 "
         "011000100001 000011001101 001001111000"},
        {3, 14, 2, 16,
         "01001011011011 11011100010110 11010001110000 01100111010101 "
         "10000111101110 11001000100101 01111011001100 10111110111001 "
         "10100010000010 00011010110100 11110010101111 00111101100011 "
         "00100000111110 00010100001001 01101100101000 10101001011101"},
        {3, 16, 2, 17,
         "0010001000110000 1101100100110001 1001011110010110 "
         "1100101010101100 1011010001100101 0000101101000101 "
         "1011100011011000 0001111001101010 0110110100011100 "
         "0111100111100110 0111011111111001 0000000011111111 "
         "0111001000001111 1100000101001010 1110111001010011 "
         "0100010010000001 1010110110101011"},
    };
    return arrays;
}

}  // namespace splnoise::detail

#endif  // SPLNOISE_DETAIL_CA_TABLES_HPP
