int max(int a, int b) {
  return a > b ? a : b;
}
int main() {
  int n, i, j, ans;
  scanf("%d", &n);
  int A[n][n], D[n][n];
  for (i = 0; i < n; i++)
    for (j = 0; j <= i; j++)
      scanf("%d", &A[i][j]);
  D[0][0] = A[0][0];
  for (i = 1; i < n; i++)
    for (j = 0; j <= i; j++) {
      if (j == 0)
        D[i][j] = A[i][j] + D[i-1][j];
      else if (j == i)
        D[i][j] = A[i][j] + D[i-1][j-1];
      else
        D[i][j] = A[i][j] + max(D[i-1][j], D[i-1][j-1]);
    }
  ans = D[n-1][0];
  for (j = 1; j < n; j++)
    ans = max(ans, D[n-1][j]);
  printf("%d\n", ans);
  return 0;
}
