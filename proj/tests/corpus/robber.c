int max(int x, int y) {
  if (x > y) return x;
  return y;
}
int main() {
  int n, i, best;
  scanf("%d", &n);
  int a[n + 1], dp[n + 1];
  for (i = 1; i <= n; i++)
    scanf("%d", &a[i]);
  dp[0] = 0;
  dp[1] = a[1];
  for (i = 2; i <= n; i++)
    dp[i] = max(dp[i - 1], dp[i - 2] + a[i]);
  best = dp[0];
  for (i = 1; i <= n; i++)
    best = max(best, dp[i]);
  printf("%d\n", best);
  return 0;
}
