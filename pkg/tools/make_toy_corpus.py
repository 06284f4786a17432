"""Regenerate src/lenient_cer/data/toy_corpus.txt (1000 template sentences).

    python tools/make_toy_corpus.py > src/lenient_cer/data/toy_corpus.txt
"""

import random

FOODS = ["拉麺", "寿司", "カレー", "ケーキ", "パン", "うどん", "そば", "肉", "魚", "ピザ"]
SKILLS = ["歌", "絵", "料理", "ダンス", "ピアノ", "英語", "サッカー", "運転"]
PEOPLE = ["彼", "彼女", "私の友達", "兄", "姉", "先生", "田中さん", "妹"]
EVENTS = ["MTサミット", "会議", "オリンピック", "学会", "展示会", "大会"]
PLACES = ["東京", "大阪", "京都", "駅前", "日本"]
ANIMALS = ["猫", "犬", "うさぎ", "鳥"]

TEMPLATES = [
    (12, lambda r: f"この{r.choice(FOODS)}は旨い。"),
    (6, lambda r: f"この{r.choice(FOODS)}はうまい。"),
    (5, lambda r: f"{r.choice(FOODS)}が旨い店です。"),
    (3, lambda r: f"あの店の{r.choice(FOODS)}は本当に旨い。"),
    (4, lambda r: f"この{r.choice(FOODS)}は美味しい。"),
    (2, lambda r: f"{r.choice(FOODS)}は美味い。"),
    (10, lambda r: f"{r.choice(PEOPLE)}は{r.choice(SKILLS)}が上手い。"),
    (4, lambda r: f"{r.choice(SKILLS)}が上手いですね。"),
    (3, lambda r: f"{r.choice(PEOPLE)}は{r.choice(SKILLS)}がうまい。"),
    (8, lambda r: f"再び、{r.choice(EVENTS)}が日本で開かれる。"),
    (6, lambda r: f"{r.choice(EVENTS)}は日本で行われます。"),
    (5, lambda r: f"日本の{r.choice(FOODS)}が好きです。"),
    (6, lambda r: "頑張れ"),
    (4, lambda r: f"{r.choice(PEOPLE)}、頑張れ。"),
    (3, lambda r: "みんな頑張れ！"),
    (5, lambda r: "皆さんご機嫌よう。"),
    (3, lambda r: "皆さん、こんにちは。"),
    (2, lambda r: "皆さんご機嫌いかがですか。"),
    (4, lambda r: f"柔らかい{r.choice(FOODS)}です。"),
    (2, lambda r: "柔らかい設定になっています。"),
    (4, lambda r: f"{r.choice(ANIMALS)}が可愛い。"),
    (3, lambda r: f"この{r.choice(ANIMALS)}はかわいいね。"),
    (3, lambda r: f"{r.choice(PLACES)}は綺麗な町です。"),
    (4, lambda r: f"今日は{r.choice(PLACES)}に行きたい。"),
    (3, lambda r: f"明日は{r.choice(PLACES)}で{r.choice(FOODS)}を食べる。"),
    (3, lambda r: "どうぞよろしくお願いします。"),
    (3, lambda r: "ありがとうございます。"),
    (2, lambda r: "それはだめです。"),
    (2, lambda r: "ダメだよ。"),
    (3, lambda r: "ここに名前を書いて下さい。"),
    (2, lambda r: "少し待ってください。"),
    (3, lambda r: f"{r.choice(PEOPLE)}と一緒に映画を見る。"),
    (2, lambda r: "この映画は面白い。"),
    (2, lambda r: "今日はいい天気ですね。"),
    (2, lambda r: "わかりました。"),
]


def main(n: int = 1000, seed: int = 20240901) -> None:
    rng = random.Random(seed)
    weights = [w for w, _ in TEMPLATES]
    makers = [m for _, m in TEMPLATES]
    for _ in range(n):
        print(rng.choices(makers, weights=weights)[0](rng))


if __name__ == "__main__":
    main()
